#include <random>

#include "brp/solve.hpp"
#include "doctest.h"

using namespace brp;

namespace {

Rational small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-4, 4);
  std::uniform_int_distribution<int> den(1, 4);
  return Rational(num(rng), den(rng));
}

PiecewiseLinearPath<Rational> random_path(std::mt19937_64& rng, int d, int segments) {
  std::vector<Rational> times = {Rational(0)};
  std::vector<std::vector<Rational>> pts = {std::vector<Rational>(d, Rational(0))};
  for (int s = 0; s < segments; ++s) {
    auto p = pts.back();
    for (auto& v : p) v += small_rational(rng);
    pts.push_back(p);
    times.push_back(Rational(s + 1, segments));
  }
  return PiecewiseLinearPath<Rational>(times, pts);
}

// smooth planar curve sampled on a uniform grid
PiecewiseLinearPath<double> curved_driver(int n, double scale) {
  std::vector<double> times;
  std::vector<std::vector<double>> pts;
  for (int i = 0; i <= n; ++i) {
    double t = static_cast<double>(i) / n;
    times.push_back(t);
    pts.push_back({scale * std::sin(2.0 * t), scale * (std::cos(3.0 * t) - 1.0) / 3.0});
  }
  return PiecewiseLinearPath<double>(times, pts);
}

PolyVectorField<double> smooth_field() {
  PolyVectorField<double> f;
  f.e = 2;
  f.d = 2;
  f.comp.assign(2, {});
  Polynomial<double> a(2), b(2), c(2), d(2);
  a.add_term({0, 0}, 0.7);
  a.add_term({0, 1}, 0.3);
  b.add_term({1, 0}, -0.4);
  b.add_term({2, 0}, 0.1);
  c.add_term({0, 0}, 0.2);
  c.add_term({1, 1}, 0.25);
  d.add_term({0, 0}, -0.5);
  d.add_term({0, 2}, 0.15);
  f.comp[0] = {a, b};
  f.comp[1] = {c, d};
  f.box = {{-4.0, 4.0}, {-4.0, 4.0}};
  return f;
}

}  // namespace

TEST_CASE("euler with constant fields is exact in one step") {
  std::mt19937_64 rng(31);
  auto x = random_path(rng, 2, 5);
  auto X = lift_bv(x, 2.5);
  PolyVectorField<Rational> f;
  f.e = 2;
  f.d = 2;
  f.comp = {{Polynomial<Rational>::constant(2, Rational(2)),
             Polynomial<Rational>::constant(2, Rational(-1))},
            {Polynomial<Rational>::constant(2, Rational(1, 3)),
             Polynomial<Rational>::constant(2, Rational(5))}};
  std::vector<Rational> xi = {Rational(1), Rational(0)};

  auto inc = X.increment(0, X.size() - 1);
  std::vector<Rational> expect = xi;
  for (int a = 1; a <= 2; ++a)
    for (int i = 0; i < 2; ++i)
      expect[i] += f.comp[a - 1][i].eval(xi) * inc.value(leaf(a));

  auto one = solve_euler(X, f, xi, {0, X.size() - 1});
  CHECK(one.states.back() == expect);
  auto fine = solve_euler(X, f, xi);
  CHECK(fine.states.back() == expect);
}

TEST_CASE("one euler step on a single nonzero tree") {
  auto basis = HopfBasis::get(1, 2);
  Character<Rational> st(basis);
  st.set_value(leaf(2), Rational(3, 2));
  BranchedRoughPath<Rational> X(1.0, basis, {0.0, 1.0}, {Character<Rational>(basis), st});

  PolyVectorField<Rational> f;
  f.e = 1;
  f.d = 2;
  Polynomial<Rational> p1(1), p2(1);
  p1.add_term({1}, Rational(7));
  p2.add_term({2}, Rational(1));
  f.comp = {{p1}, {p2}};
  std::vector<Rational> xi = {Rational(2)};
  auto rep = solve_euler(X, f, xi);
  // y + f_2(y) * 3/2 = 2 + 4 * 3/2
  CHECK(rep.states.back()[0] == Rational(8));
}

TEST_CASE("euler converges to the classical flow") {
  const int n = 4096;
  std::vector<double> times;
  std::vector<std::vector<double>> pts;
  for (int i = 0; i <= n; ++i) {
    times.push_back(static_cast<double>(i) / n);
    pts.push_back({static_cast<double>(i) / n});
  }
  auto X = lift_bv(PiecewiseLinearPath<double>(times, pts), 2.5);
  PolyVectorField<double> f;
  f.e = f.d = 1;
  f.comp = {{Polynomial<double>::variable(1, 0)}};
  f.box = {{-0.5, 3.0}};
  auto rep = solve_euler(X, f, {1.0});
  CHECK(std::abs(rep.states.back()[0] - std::exp(1.0)) <= 1e-6);
}

TEST_CASE("euler trajectory is invariant under the lambda normalization") {
  std::mt19937_64 rng(37);
  auto x = random_path(rng, 2, 4);
  auto X = lift_bv(x, 2.5);
  PolyVectorField<Rational> f;
  f.e = 2;
  f.d = 2;
  f.comp.assign(2, {});
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i) {
      Polynomial<Rational> p(2);
      p.add_term({1, 0}, small_rational(rng));
      p.add_term({0, 1}, small_rational(rng));
      p.add_term({1, 1}, small_rational(rng));
      f.comp[a].push_back(p);
    }
  std::vector<Rational> xi = {Rational(1, 2), Rational(-1, 3)};

  auto base = solve_euler(X, f, xi);
  Rational lambda(3);
  auto Xs = dilate(X, lambda);
  auto fs = f;
  for (auto& m : fs.comp)
    for (auto& p : m) p *= Rational(1) / lambda;
  auto scaled = solve_euler(Xs, fs, xi);
  REQUIRE(base.states.size() == scaled.states.size());
  for (std::size_t k = 0; k < base.states.size(); ++k) CHECK(base.states[k] == scaled.states[k]);
}

TEST_CASE("both backends sit still on the trivial rough path") {
  auto flat = PiecewiseLinearPath<double>::constant(std::vector<double>{0.0, 0.0}, 0.0, 1.0);
  auto X = lift_bv(flat, 2.5);
  auto f = smooth_field();
  std::vector<double> xi = {0.3, -0.2};
  auto eu = solve_euler(X, f, xi);
  for (const auto& st : eu.states) CHECK(st == xi);
  auto ge = solve_geodesic(X, f, xi);
  for (const auto& st : ge.states) CHECK(st == xi);
}

TEST_CASE("geodesic backend reproduces the classical flow") {
  const int n = 256;
  std::vector<double> times;
  std::vector<std::vector<double>> pts;
  for (int i = 0; i <= n; ++i) {
    times.push_back(static_cast<double>(i) / n);
    pts.push_back({static_cast<double>(i) / n});
  }
  auto X = lift_bv(PiecewiseLinearPath<double>(times, pts), 3.5);
  PolyVectorField<double> f;
  f.e = f.d = 1;
  f.comp = {{Polynomial<double>::variable(1, 0)}};
  f.box = {{-0.5, 3.0}};
  auto rep = solve_geodesic(X, f, {1.0});
  CHECK(std::abs(rep.states.back()[0] - std::exp(1.0)) <= 1e-8);
}

TEST_CASE("backends agree on canonical lifts under refinement") {
  auto f = smooth_field();
  std::vector<double> xi = {0.1, 0.2};
  double prev = -1.0;
  for (int n : {64, 256, 1024}) {
    auto X = lift_bv(curved_driver(n, 0.8), 2.5);
    auto eu = solve_euler(X, f, xi);
    auto ge = solve_geodesic(X, f, xi);
    double diff = 0.0;
    for (std::size_t k = 0; k < eu.states.size(); ++k)
      for (int i = 0; i < 2; ++i)
        diff = std::max(diff, std::abs(eu.states[k][i] - ge.states[k][i]));
    if (prev >= 0.0) CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev <= 1e-5);
}

TEST_CASE("defect scan fits the expected scaling") {
  auto X = lift_bv(curved_driver(256, 1.0), 2.5);
  auto f = smooth_field();
  auto rep = solve_euler(X, f, {0.1, -0.1});
  auto fit = defect_scan(X, f, rep);
  CHECK(!fit.exact);
  CHECK(fit.points > 0);
  CHECK(fit.slope >= 3.0 / 2.5 - 0.15);

  // slope is unchanged by the proof's simultaneous rescale of f and X
  auto Xs = dilate(X, 2.0);
  auto fs = f;
  for (auto& m : fs.comp)
    for (auto& p : m) p *= 0.5;
  auto reps = solve_euler(Xs, fs, {0.1, -0.1});
  auto fits = defect_scan(Xs, fs, reps);
  CHECK(fits.slope == doctest::Approx(fit.slope).epsilon(1e-9));
}

TEST_CASE("defect scan edge cases") {
  auto X = lift_bv(curved_driver(64, 1.0), 2.5);
  PolyVectorField<double> zero;
  zero.e = 2;
  zero.d = 2;
  zero.comp.assign(2, PolyMap<double>(2, Polynomial<double>(2)));
  auto rep = solve_euler(X, zero, {0.0, 0.0});
  auto fit = defect_scan(X, zero, rep);
  CHECK(fit.exact);

  auto f = smooth_field();
  auto Xs = lift_bv(curved_driver(4, 1.0), 2.5);
  auto small = solve_euler(Xs, f, {0.0, 0.0});
  CHECK_THROWS_AS((void)defect_scan(Xs, f, small), std::runtime_error);
}

TEST_CASE("solver input guards") {
  std::mt19937_64 rng(41);
  auto x = random_path(rng, 2, 3);
  auto X = lift_bv(x, 2.5);
  PolyVectorField<Rational> f;
  f.e = 1;
  f.d = 1;  // wrong label count
  f.comp = {{Polynomial<Rational>::constant(1, Rational(1))}};
  CHECK_THROWS_AS((void)solve_euler(X, f, {Rational(0)}), std::invalid_argument);

  PolyVectorField<double> box_field;
  box_field.e = box_field.d = 1;
  box_field.comp = {{Polynomial<double>::constant(1, 1.0)}};
  box_field.box = {{-0.1, 0.1}};
  std::vector<double> times = {0.0, 1.0};
  std::vector<std::vector<double>> pts = {{0.0}, {2.0}};
  auto Xd = lift_bv(PiecewiseLinearPath<double>(times, pts), 1.5);
  CHECK_THROWS_AS((void)solve_euler(Xd, box_field, {0.0}), std::runtime_error);
}
