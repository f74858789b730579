#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "brp/json_io.hpp"
#include "brp/solve.hpp"
#include "brp/version.hpp"
#include "harness/check_algebra.hpp"
#include "harness/experiments.hpp"

namespace fs = std::filesystem;
using brp::Json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = ".";
  bool exact = false;
  int threads = 1;
  bool threads_given = false;
  std::string config_path;
};

Json load_config(const std::string& path) {
  if (path.empty()) throw std::runtime_error("this subcommand needs --config <file>");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return Json::parse(in);
}

void write_text(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << text;
}

void write_json(const fs::path& dir, const std::string& name, const Json& j) {
  write_text(dir, name, j.dump(2) + "\n");
}

// ------------------------------------------------------------ check-algebra

int cmd_check_algebra(const GlobalOpts& g, int N, int d, int characters, bool inject) {
  brp::harness::AlgebraCheckOptions opt;
  opt.N = N;
  opt.d = d;
  opt.seed = g.seed;
  opt.random_characters = characters;
  opt.inject_cut_sign_flip = inject;
  auto rep = brp::harness::check_algebra(opt);

  Json cfg{{"N", N},
           {"d", d},
           {"seed", g.seed},
           {"random_characters", characters},
           {"inject", inject}};
  Json out = brp::harness::report_envelope(cfg, N, d);
  Json suites = Json::array();
  for (const auto& s : rep.suites) {
    Json js{{"name", s.name}, {"pass", s.pass}, {"checks", s.checks}};
    if (!s.counterexample.empty()) js["counterexample"] = s.counterexample;
    suites.push_back(js);
    std::cout << (s.pass ? "pass" : "FAIL") << "  " << s.name << "  (" << s.checks
              << " checks)";
    if (!s.pass) std::cout << "  counterexample: " << s.counterexample;
    std::cout << "\n";
  }
  out["suites"] = suites;
  out["checks"] = rep.checks;
  out["pass"] = rep.pass;
  if (!rep.counterexample.empty()) out["counterexample"] = rep.counterexample;
  write_json(g.out, "check_algebra.json", out);
  std::cout << (rep.pass ? "all suites pass" : "algebra check FAILED") << " (" << rep.checks
            << " checks, N=" << N << ", d=" << d << ")\n";
  return rep.pass ? 0 : 1;
}

// --------------------------------------------------------------------- lift

template <class S>
std::pair<Json, int> lift_impl(const Json& cfg, double p) {
  auto x = brp::path_from_json<S>(cfg.at("path"));
  auto X = brp::lift_bv(x, p);
  return {brp::rough_path_to_json(X), x.dim()};
}

int cmd_lift(const GlobalOpts& g) {
  Json cfg = load_config(g.config_path);
  const double p = cfg.at("p").get<double>();
  auto [rp, d] = g.exact ? lift_impl<brp::Rational>(cfg, p) : lift_impl<double>(cfg, p);
  Json out = brp::harness::report_envelope(cfg, static_cast<int>(p), d);
  out["rough_path"] = rp;
  out["mode"] = g.exact ? "exact" : "float";
  write_json(g.out, "lift.json", out);
  std::cout << "lifted " << rp.at("states").size() << " states at p=" << p << " (d=" << d
            << (g.exact ? ", exact)\n" : ", float)\n");
  return 0;
}

// -------------------------------------------------------------------- solve

template <class S>
std::pair<Json, std::vector<double>> solve_impl(const Json& cfg, const std::string& backend) {
  auto f = brp::field_from_json<S>(cfg.at("field"));
  std::vector<S> xi;
  for (const auto& v : cfg.at("xi")) xi.push_back(brp::scalar_from_json<S>(v));

  std::optional<brp::BranchedRoughPath<S>> X;
  if (cfg.contains("rough_path")) {
    X.emplace(brp::rough_path_from_json<S>(cfg.at("rough_path")));
  } else {
    auto x = brp::path_from_json<S>(cfg.at("path"));
    X.emplace(brp::lift_bv(x, cfg.at("p").get<double>()));
  }

  brp::SolveReport<S> rep;
  if (backend == "euler") {
    rep = brp::solve_euler(*X, f, xi);
  } else if (backend == "geodesic") {
    if constexpr (std::is_same_v<S, double>) {
      rep = brp::solve_geodesic(*X, f, xi);
    } else {
      throw std::runtime_error("the geodesic backend runs in float mode only");
    }
  } else {
    throw std::runtime_error("unknown backend: " + backend);
  }

  Json states = Json::array();
  for (const auto& row : rep.states) {
    Json jr = Json::array();
    for (const auto& v : row) jr.push_back(brp::scalar_to_json<S>(v));
    states.push_back(jr);
  }
  Json grid = Json::array();
  for (auto i : rep.indices) grid.push_back(X->grid()[i]);
  Json body{{"indices", rep.indices}, {"grid", grid}, {"states", states},
            {"N", X->N()},            {"d", X->d()},  {"p", X->p()}};
  std::vector<double> last;
  for (const auto& v : rep.states.back()) last.push_back(brp::to_double(v));
  return {body, last};
}

int cmd_solve(const GlobalOpts& g) {
  Json cfg = load_config(g.config_path);
  const std::string backend = cfg.value("backend", std::string("euler"));
  auto [body, last] =
      g.exact ? solve_impl<brp::Rational>(cfg, backend) : solve_impl<double>(cfg, backend);
  Json out =
      brp::harness::report_envelope(cfg, body.at("N").get<int>(), body.at("d").get<int>());
  out["solution"] = body;
  out["backend"] = backend;
  out["mode"] = g.exact ? "exact" : "float";
  write_json(g.out, "solve.json", out);
  std::cout << "solved with " << backend << " backend; final state = [";
  for (std::size_t i = 0; i < last.size(); ++i) std::cout << (i ? ", " : "") << last[i];
  std::cout << "]\n";
  return 0;
}

// ------------------------------------------------------------------ realize

struct RealizeOutcome {
  Json body;
  bool pass = false;
};

template <class S>
RealizeOutcome realize_impl(const Json& cfg, bool exact, double tol) {
  auto a = brp::character_from_json<S>(cfg.at("character"));
  auto alph = brp::Alphabet::get(a.N(), a.d());
  const double lie_tol = cfg.value("lie_tol", exact ? 0.0 : 1e-9);
  auto res = brp::realize_gl(alph, brp::rescale(a), lie_tol);

  // round trip: the word signature of the realized path, carried through the
  // isomorphism, must land back on the rescaled input
  auto gl = brp::phi(brp::signature(res.path, alph, a.N()));
  auto target = brp::rescale(a);
  double residual = 0.0;
  for (std::size_t fi = 0; fi < gl.coeffs().size(); ++fi)
    residual = std::max(residual,
                        std::abs(brp::to_double(gl[static_cast<int>(fi)] -
                                                target[static_cast<int>(fi)])));
  bool pass = exact ? gl.coeffs() == target.coeffs() : residual <= tol;

  RealizeOutcome out;
  out.pass = pass;
  out.body = Json{{"path", brp::path_to_json(res.path)},
                  {"K", alph->K()},
                  {"segments", res.path.segment_count()},
                  {"lie_residual", res.lie_residual},
                  {"round_trip_residual", residual},
                  {"round_trip_exact", exact && pass},
                  {"pass", pass}};
  return out;
}

int cmd_realize(const GlobalOpts& g) {
  Json cfg = load_config(g.config_path);
  const double tol = cfg.value("tol", 1e-9);
  auto outcome = g.exact ? realize_impl<brp::Rational>(cfg, true, tol)
                         : realize_impl<double>(cfg, false, tol);
  const auto& ch = cfg.at("character");
  Json out = brp::harness::report_envelope(cfg, ch.at("N").get<int>(), ch.at("d").get<int>());
  out.update(outcome.body);
  out["mode"] = g.exact ? "exact" : "float";
  write_json(g.out, "realize.json", out);
  std::cout << "realized " << out.at("segments") << " segments over " << out.at("K")
            << " letters; round trip residual = " << out.at("round_trip_residual").dump()
            << (outcome.pass ? " (pass)\n" : " (FAIL)\n");
  return outcome.pass ? 0 : 1;
}

// -------------------------------------------------------------- experiments

int cmd_exp_lipschitz(const GlobalOpts& g) {
  brp::harness::LipschitzConfig cfg;
  if (!g.config_path.empty()) {
    cfg = brp::harness::lipschitz_config_from_json(load_config(g.config_path));
  }
  if (g.seed_given) cfg.seed = g.seed;
  if (g.threads_given) cfg.threads = g.threads;
  auto rep = brp::harness::lipschitz_experiment(cfg);
  write_json(g.out, "lipschitz.json", brp::harness::lipschitz_report_json(cfg, rep));
  write_text(g.out, "lipschitz_sweeps.csv", brp::harness::lipschitz_sweeps_csv(rep));
  write_text(g.out, "lipschitz_tscale.csv", brp::harness::lipschitz_tscale_csv(rep));
  for (const auto& s : rep.sweeps)
    std::cout << (s.pass ? "pass" : "FAIL") << "  sweep " << s.name << ": slope = " << s.slope
              << ", M^ = " << s.m_hat << "\n";
  std::cout << (rep.zero_h_identical && rep.zero_h_lhs == 0.0 ? "pass" : "FAIL")
            << "  h=0 reproduces the base trajectory exactly\n";
  std::cout << (rep.lambda_exact && rep.lambda_drift == 0.0 ? "pass" : "FAIL")
            << "  normalization invariance (exact and dyadic float)\n";
  std::cout << (rep.tscale_pass ? "pass" : "FAIL")
            << "  log M^ affine in omega(0,T): slope = " << rep.tscale_slope
            << ", residual = " << rep.tscale_residual << "\n";
  std::cout << (rep.pass ? "lipschitz experiment passes\n" : "lipschitz experiment FAILED\n");
  return rep.pass ? 0 : 1;
}

int cmd_exp_ode_bounds(const GlobalOpts& g) {
  brp::harness::OdeBoundsConfig cfg;
  if (!g.config_path.empty()) {
    cfg = brp::harness::ode_bounds_config_from_json(load_config(g.config_path));
  }
  if (g.seed_given) cfg.seed = g.seed;
  if (g.threads_given) cfg.threads = g.threads;
  auto rep = brp::harness::ode_bounds_experiment(cfg);
  write_json(g.out, "ode_bounds.json", brp::harness::ode_bounds_report_json(cfg, rep));
  write_text(g.out, "ode_bounds.csv", brp::harness::ode_bounds_csv(rep));
  for (const auto& r : rep.rows)
    if (!r.pass)
      std::cout << "FAIL  instance " << r.index
                << (r.error.empty() ? "" : (": " + r.error)) << "\n";
  std::cout << rep.passes << "/" << rep.rows.size()
            << " instances satisfy both estimates (max driver 1-variation = "
            << rep.max_one_variation << ")\n";
  return rep.pass ? 0 : 1;
}

int cmd_exp_convergence(const GlobalOpts& g) {
  brp::harness::ConvergenceConfig cfg;
  if (!g.config_path.empty()) {
    cfg = brp::harness::convergence_config_from_json(load_config(g.config_path));
  }
  if (g.seed_given) cfg.seed = g.seed;
  if (g.threads_given) cfg.threads = g.threads;
  auto rep = brp::harness::convergence_experiment(cfg);
  write_json(g.out, "convergence.json", brp::harness::convergence_report_json(cfg, rep));
  write_text(g.out, "convergence_defect.csv", brp::harness::convergence_defect_csv(rep));
  write_text(g.out, "convergence_backend.csv", brp::harness::convergence_backend_csv(rep));
  for (const auto& r : rep.defects)
    std::cout << (r.pass ? "pass" : "FAIL") << "  defect slope p=" << r.p << ": " << r.slope
              << " (need >= " << r.threshold << ")\n";
  for (const auto& r : rep.backends)
    std::cout << (r.pass ? "pass" : "FAIL") << "  backend gap p=" << r.p
              << ": order = " << r.order << ", finest = " << r.finest << "\n";
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branched rough paths: algebra checks, solvers and experiments"};
  app.set_version_flag("--version", std::string(brp::kVersion));
  app.require_subcommand(1);

  GlobalOpts g;
  bool want_float = false;
  auto* seed_opt = app.add_option("--seed", g.seed, "experiment master seed");
  auto* threads_opt = app.add_option("--threads", g.threads, "worker threads")
                          ->check(CLI::Range(1, 256));
  app.add_option("--out", g.out, "output directory (default .)");
  app.add_option("--config", g.config_path, "JSON config file");
  auto* exact_flag = app.add_flag("--exact", g.exact, "exact rational arithmetic");
  app.add_flag("--float", want_float, "double arithmetic (default)")->excludes(exact_flag);

  int ca_n = 4, ca_d = 2, ca_chars = 4;
  bool ca_inject = false;
  auto* ca = app.add_subcommand("check-algebra", "exhaustive Hopf identity suites");
  ca->add_option("--N", ca_n, "truncation degree")->check(CLI::Range(1, 4));
  ca->add_option("--d", ca_d, "label count")->check(CLI::Range(1, 3));
  ca->add_option("--characters", ca_chars, "random character pairs");
  ca->add_flag("--inject", ca_inject, "corrupt one coproduct table entry; run must fail");

  auto* lift = app.add_subcommand("lift", "canonical lift of a piecewise linear path");
  auto* solve = app.add_subcommand("solve", "drive a field along a rough path");
  auto* realize = app.add_subcommand("realize", "geodesic path for a group element");
  auto* lip = app.add_subcommand("exp-lipschitz", "perturbation sweeps and M^ scaling");
  auto* ode = app.add_subcommand("exp-ode-bounds", "randomized ODE stability estimates");
  auto* conv = app.add_subcommand("exp-convergence", "defect scaling and backend agreement");
  for (auto* sub : {ca, lift, solve, realize, lip, ode, conv}) sub->fallthrough();

  // callbacks fire at the end of parse; pick up flag presence first
  auto finalize = [&] {
    g.seed_given = seed_opt->count() > 0;
    g.threads_given = threads_opt->count() > 0;
    (void)want_float;
  };
  int rc = 0;
  ca->callback([&] {
    finalize();
    rc = cmd_check_algebra(g, ca_n, ca_d, ca_chars, ca_inject);
  });
  lift->callback([&] {
    finalize();
    rc = cmd_lift(g);
  });
  solve->callback([&] {
    finalize();
    rc = cmd_solve(g);
  });
  realize->callback([&] {
    finalize();
    rc = cmd_realize(g);
  });
  lip->callback([&] {
    finalize();
    rc = cmd_exp_lipschitz(g);
  });
  ode->callback([&] {
    finalize();
    rc = cmd_exp_ode_bounds(g);
  });
  conv->callback([&] {
    finalize();
    rc = cmd_exp_convergence(g);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return rc;
}
