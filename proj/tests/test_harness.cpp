#include <set>
#include <stdexcept>

#include "brp/json_io.hpp"
#include "brp/rng.hpp"
#include "doctest.h"
#include "harness/check_algebra.hpp"
#include "harness/experiments.hpp"
#include "harness/fit.hpp"
#include "harness/format.hpp"
#include "harness/instances.hpp"

using namespace brp;
using namespace brp::harness;

TEST_CASE("rational scalars survive the json round trip") {
  Rational q(-3, 7);
  Json j = scalar_to_json<Rational>(q);
  CHECK(j.is_string());
  CHECK(j.get<std::string>() == "-3/7");
  CHECK(scalar_from_json<Rational>(j) == q);
  CHECK(scalar_from_json<Rational>(Json(5)) == Rational(5));
  // doubles enter through the exact dyadic conversion
  CHECK(scalar_from_json<Rational>(Json(0.25)) == Rational(1, 4));
  CHECK(scalar_from_json<double>(Json("1/8")) == 0.125);
}

TEST_CASE("paths, fields, characters and rough paths round trip through json") {
  CounterRng rng(3, 0);
  auto xq = random_rational_path(rng, 2, 4);
  CHECK(path_to_json(path_from_json<Rational>(path_to_json(xq))) == path_to_json(xq));

  auto x = random_path(rng, 2, 6, 0.4);
  CHECK(path_to_json(path_from_json<double>(path_to_json(x))) == path_to_json(x));

  auto f = random_field(rng, 2, 2, 2, 0.6, 3.0, 0.0);
  CHECK(field_to_json(field_from_json<double>(field_to_json(f))) == field_to_json(f));
  auto fq = random_rational_field(rng, 2, 2, 2, 2.0);
  CHECK(field_to_json(field_from_json<Rational>(field_to_json(fq))) == field_to_json(fq));

  auto X = lift_bv(xq, 2.5);
  auto a = X.increment(0, X.size() - 1);
  CHECK(character_from_json<Rational>(character_to_json(a)) == a);
  Json jx = rough_path_to_json(X);
  CHECK(rough_path_to_json(rough_path_from_json<Rational>(jx)) == jx);
}

TEST_CASE("json hash is canonical and sensitive") {
  Json a = {{"p", 2.5}, {"seed", 0}};
  Json b;
  b["seed"] = 0;
  b["p"] = 2.5;
  CHECK(json_hash(a) == json_hash(b));
  CHECK(json_hash(a).size() == 16);
  b["seed"] = 1;
  CHECK(json_hash(a) != json_hash(b));
}

TEST_CASE("counter rng streams are reproducible and independent") {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  bool diverged = false;
  for (int k = 0; k < 64; ++k) {
    auto va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) diverged = true;
  }
  CHECK(diverged);

  CounterRng r(7, 0);
  std::set<int> seen;
  for (int k = 0; k < 256; ++k) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    int v = r.uniform_int(2, 5);
    CHECK(v >= 2);
    CHECK(v <= 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 4);
  CHECK_THROWS_AS(r.uniform_int(3, 2), std::invalid_argument);
}

TEST_CASE("least squares recovers exact lines and rejects degenerate input") {
  std::vector<double> x = {0, 1, 2, 3};
  std::vector<double> y = {1, 3, 5, 7};
  auto fit = fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.rms == doctest::Approx(0.0));
  CHECK(fit.n == 4);
  CHECK_THROWS_AS(fit_line({1.0}, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({2.0, 2.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("bracket formatting of trees and forests") {
  CHECK(format_tree(leaf(3)) == "3");
  // children and forest factors print in canonical multiset order
  CHECK(format_tree(Tree(2, {leaf(1), Tree(1, {leaf(2)})})) == "2[1[2],1]");
  CHECK(format_forest(Forest()) == "1");
  CHECK(format_forest(Forest(std::vector<Tree>{Tree(1, {leaf(1)}), leaf(1)})) == "1[1].1");
}

TEST_CASE("exponent enumeration is graded and complete") {
  auto exps = exponents_up_to(2, 3);
  CHECK(exps.size() == 10);  // binom(2+3, 3)
  CHECK(exps.front() == std::vector<int>{0, 0});
  int prev = 0;
  for (const auto& m : exps) {
    int total = m[0] + m[1];
    CHECK(total <= 3);
    CHECK(total >= prev);
    prev = total;
  }
  CHECK(exponents_up_to(1, 4).size() == 5);
}

TEST_CASE("random fields respect the sup norm cap") {
  CounterRng rng(9, 0);
  auto f = random_field(rng, 2, 2, 3, 0.8, 2.0, 0.15);
  for (int a = 1; a <= 2; ++a) CHECK(sup_norm(f.restriction(a)) <= 0.15 + 1e-12);
  auto g = random_field(rng, 2, 2, 2, 0.5, 0.0, 0.0);
  CHECK(g.box.empty());
}

TEST_CASE("parallel for covers every index once and propagates exceptions") {
  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](int i) { hits[i]++; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(8, 3,
                               [&](int i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("hopf suites pass exhaustively and catch an injected sign flip") {
  AlgebraCheckOptions opt;
  opt.N = 3;
  opt.d = 2;
  opt.random_characters = 2;
  auto rep = check_algebra(opt);
  CHECK(rep.pass);
  CHECK(rep.checks > 0);
  CHECK(rep.counterexample.empty());
  for (const auto& s : rep.suites) CHECK(s.pass);

  opt.inject_cut_sign_flip = true;
  auto bad = check_algebra(opt);
  CHECK(!bad.pass);
  CHECK(bad.counterexample == "1[1]");
  bool consistency_failed = false;
  for (const auto& s : bad.suites)
    if (s.name == "tree-forest consistency" && !s.pass && s.counterexample == "1[1]")
      consistency_failed = true;
  CHECK(consistency_failed);
}

TEST_CASE("omega table agrees with the memoized control") {
  CounterRng rng(11, 0);
  auto x = random_path(rng, 2, 12, 0.3);
  auto y = random_path(rng, 2, 12, 0.3);
  auto X = lift_bv(x, 2.5);
  auto Y = lift_bv(y, 2.5);

  auto om1 = omega_table(X, nullptr, 2.5);
  ControlOmega<double> c1(X, 2.5);
  auto om2 = omega_table(X, &Y, 2.5);
  ControlOmega<double> c2(X, Y, 2.5);
  for (std::size_t i = 0; i < X.size(); i += 3)
    for (std::size_t j = i; j < X.size(); j += 2) {
      CHECK(om1[i][j] == doctest::Approx(c1(i, j)).epsilon(1e-12));
      CHECK(om2[i][j] == doctest::Approx(c2(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("rho from a table agrees with the library distance") {
  CounterRng rng(13, 0);
  auto x1 = random_path(rng, 2, 10, 0.3);
  auto x2 = random_path(rng, 2, 10, 0.3);
  auto X1 = lift_bv(x1, 2.5);
  auto X2 = lift_bv(x2, 2.5);
  auto om = omega_table(X1, &X2, 2.5);
  CHECK(rho_from_table(X1, X2, om) == doctest::Approx(rho_distance(X1, X2)).epsilon(1e-12));
}

TEST_CASE("experiment configs persist through json") {
  LipschitzConfig lc;
  lc.p = 1.5;
  lc.segments = 10;
  lc.hs = {0.5, 0.25};
  lc.top_h_scale = 0.03125;
  lc.t_blocks = {1, 2};
  lc.seed = 9;
  CHECK(lipschitz_config_json(lipschitz_config_from_json(lipschitz_config_json(lc))) ==
        lipschitz_config_json(lc));

  OdeBoundsConfig oc;
  oc.instances = 17;
  oc.max_k = 2;
  oc.slack = 1e-5;
  oc.seed = 4;
  CHECK(ode_bounds_config_json(ode_bounds_config_from_json(ode_bounds_config_json(oc))) ==
        ode_bounds_config_json(oc));

  ConvergenceConfig cc;
  cc.ps = {2.5};
  cc.meshes = {16, 32};
  cc.agree_tol = 1e-4;
  cc.seed = 2;
  CHECK(convergence_config_json(convergence_config_from_json(convergence_config_json(cc))) ==
        convergence_config_json(cc));
}

TEST_CASE("ode bounds report is deterministic across thread counts") {
  OdeBoundsConfig oc;
  oc.instances = 5;
  oc.threads = 1;
  auto r1 = ode_bounds_experiment(oc);
  oc.threads = 3;
  auto r2 = ode_bounds_experiment(oc);
  CHECK(r1.rows.size() == 5);
  CHECK(r1.pass);
  oc.threads = 1;  // report embeds the config; compare numerics only
  Json j1 = ode_bounds_report_json(oc, r1);
  Json j2 = ode_bounds_report_json(oc, r2);
  CHECK(j1.dump() == j2.dump());
  CHECK(j1.contains("version"));
  CHECK(j1.contains("config_hash"));
  CHECK(j1.contains("alphabet_hash"));
  CHECK(j1.at("config_hash").get<std::string>() == json_hash(ode_bounds_config_json(oc)));
  CHECK(ode_bounds_csv(r1).rfind("index,", 0) == 0);
}

TEST_CASE("small convergence run is deterministic") {
  ConvergenceConfig cc;
  cc.ps = {2.5};
  cc.defect_segments = 64;
  cc.meshes = {16, 32, 64};
  cc.agree_tol = 1e-2;
  cc.threads = 2;
  auto r1 = convergence_experiment(cc);
  auto r2 = convergence_experiment(cc);
  CHECK(convergence_report_json(cc, r1).dump() == convergence_report_json(cc, r2).dump());
  CHECK(r1.defects.size() == 1);
  CHECK(r1.backends.size() == 1);
  CHECK(r1.backends.front().samples.size() == 3);
  CHECK(convergence_defect_csv(r1).rfind("p,", 0) == 0);
  CHECK(convergence_backend_csv(r1).rfind("p,", 0) == 0);
}

TEST_CASE("small lipschitz run is deterministic and fully populated") {
  LipschitzConfig lc;
  lc.segments = 24;
  lc.hs = {0.1, 0.05, 0.025};
  lc.t_blocks = {1, 2};
  auto r1 = lipschitz_experiment(lc);
  auto r2 = lipschitz_experiment(lc);
  CHECK(lipschitz_report_json(lc, r1).dump() == lipschitz_report_json(lc, r2).dump());
  CHECK(r1.sweeps.size() == 3);
  for (const auto& s : r1.sweeps) CHECK(s.points.size() == 3);
  CHECK(r1.zero_h_identical);
  CHECK(r1.lambda_exact);
  CHECK(r1.lambda_drift == 0.0);
  CHECK(r1.tscale.size() == 2);
  CHECK(lipschitz_sweeps_csv(r1).rfind("sweep,", 0) == 0);
  CHECK(lipschitz_tscale_csv(r1).rfind("blocks,", 0) == 0);
}
