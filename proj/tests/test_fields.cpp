#include <random>

#include "brp/ode.hpp"
#include "brp/vector_field.hpp"
#include "doctest.h"

using namespace brp;

namespace {

Polynomial<double> dpoly(int vars, std::vector<std::pair<std::vector<int>, double>> terms) {
  Polynomial<double> p(vars);
  for (auto& [ex, c] : terms) p.add_term(ex, c);
  return p;
}

// scalar field f1(y) = y^2 in one variable
PolyVectorField<double> square_field() {
  PolyVectorField<double> f;
  f.e = f.d = 1;
  f.comp = {{dpoly(1, {{{2}, 1.0}})}};
  f.box = {{-1.0, 1.0}};
  return f;
}

std::vector<double> rand_point(std::mt19937_64& rng, int e, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<double> y(e);
  for (auto& v : y) v = u(rng);
  return y;
}

Polynomial<double> rand_poly(std::mt19937_64& rng, int vars, int maxdeg, double scale) {
  std::uniform_int_distribution<int> nd(1, 4);
  std::uniform_int_distribution<int> dd(0, maxdeg);
  std::uniform_int_distribution<int> vd(0, vars - 1);
  std::uniform_real_distribution<double> cd(-scale, scale);
  Polynomial<double> p(vars);
  int terms = nd(rng);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> ex(vars, 0);
    int deg = dd(rng);
    for (int k = 0; k < deg; ++k) ex[vd(rng)] += 1;
    p.add_term(ex, cd(rng));
  }
  return p;
}

PolyVectorField<double> rand_field(std::mt19937_64& rng, int e, int d, double scale,
                                   double halfwidth) {
  PolyVectorField<double> f;
  f.e = e;
  f.d = d;
  f.comp.assign(d, {});
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < e; ++i) f.comp[a].push_back(rand_poly(rng, e, 2, scale));
  f.box.assign(e, {-halfwidth, halfwidth});
  return f;
}

PiecewiseLinearPath<double> rand_driver(std::mt19937_64& rng, int d, int segments,
                                        double step) {
  std::uniform_real_distribution<double> u(-step, step);
  std::vector<double> times = {0.0};
  std::vector<std::vector<double>> pts = {std::vector<double>(d, 0.0)};
  for (int s = 0; s < segments; ++s) {
    auto p = pts.back();
    for (auto& v : p) v += u(rng);
    pts.push_back(p);
    times.push_back(static_cast<double>(s + 1) / segments);
  }
  return PiecewiseLinearPath<double>(times, pts);
}

}  // namespace

TEST_CASE("elementary differentials on small trees") {
  auto f = square_field();
  for (double y : {0.5, -0.75, 1.0, 0.0}) {
    std::vector<double> pt = {y};
    CHECK(elementary_differential(f, leaf(1), pt)[0] == y * y);
    CHECK(elementary_differential(f, Tree(1, {leaf(1)}), pt)[0] == doctest::Approx(2 * y * y * y).epsilon(1e-14));
    CHECK(elementary_differential(f, Tree(1, {leaf(1), leaf(1)}), pt)[0] ==
          doctest::Approx(2 * y * y * y * y).epsilon(1e-14));
    CHECK(elementary_differential(f, Tree(1, {Tree(1, {leaf(1)})}), pt)[0] ==
          doctest::Approx(4 * y * y * y * y).epsilon(1e-14));
  }

  PolyVectorField<double> c;
  c.e = 1;
  c.d = 2;
  c.comp = {{Polynomial<double>::constant(1, 3.0)}, {Polynomial<double>::constant(1, -2.0)}};
  CHECK(elementary_differential(c, leaf(2), {0.4})[0] == -2.0);
  CHECK(elementary_differential(c, Tree(1, {leaf(2)}), {0.4})[0] == 0.0);
  CHECK(elementary_differential(c, Tree(2, {leaf(1), leaf(2)}), {0.4})[0] == 0.0);

  CHECK_THROWS_AS((void)elementary_differential(c, leaf(3), {0.0}), std::invalid_argument);
}

TEST_CASE("symbolic and numeric elementary differentials agree") {
  PolyVectorField<Rational> f;
  f.e = 2;
  f.d = 2;
  f.comp.assign(2, {});
  // f1 = (y1^2 + y2, y1 y2), f2 = (y2^2, y1 - 1)
  Polynomial<Rational> a(2), b(2), cc(2), d(2);
  a.add_term({2, 0}, Rational(1));
  a.add_term({0, 1}, Rational(1));
  b.add_term({1, 1}, Rational(1));
  cc.add_term({0, 2}, Rational(1));
  d.add_term({1, 0}, Rational(1));
  d.add_term({0, 0}, Rational(-1));
  f.comp[0] = {a, b};
  f.comp[1] = {cc, d};

  std::vector<Tree> trees = {leaf(1),
                             leaf(2),
                             Tree(1, {leaf(2)}),
                             Tree(2, {leaf(1)}),
                             Tree(1, {leaf(1), leaf(2)}),
                             Tree(2, {Tree(1, {leaf(2)})}),
                             Tree(1, {leaf(1), leaf(1), leaf(2)})};
  std::vector<std::vector<Rational>> points = {{Rational(1, 2), Rational(-1, 3)},
                                               {Rational(2), Rational(1)},
                                               {Rational(0), Rational(-3, 4)}};
  for (const auto& t : trees) {
    auto sym = elementary_differential_poly(f, t);
    for (const auto& y : points) {
      auto num = elementary_differential(f, t, y);
      auto via = eval_map(sym, y);
      REQUIRE(num.size() == via.size());
      for (std::size_t i = 0; i < num.size(); ++i) CHECK(num[i] == via[i]);
    }
  }
}

TEST_CASE("single child trees match central differences") {
  std::mt19937_64 rng(99);
  auto f = rand_field(rng, 2, 2, 0.8, 2.0);
  const double h = 1e-4;
  for (const auto& inner : {leaf(1), leaf(2), Tree(2, {leaf(1)})}) {
    for (int a = 1; a <= 2; ++a) {
      Tree t(a, {inner});
      for (int rep = 0; rep < 3; ++rep) {
        auto y = rand_point(rng, 2, 1.0);
        auto v = elementary_differential(f, inner, y);
        auto exact = elementary_differential(f, t, y);
        std::vector<double> yp = y, ym = y;
        for (int i = 0; i < 2; ++i) {
          yp[i] += h * v[i];
          ym[i] -= h * v[i];
        }
        auto fp = f.eval(a, yp);
        auto fm = f.eval(a, ym);
        for (int i = 0; i < 2; ++i) {
          double approx = (fp[i] - fm[i]) / (2 * h);
          CHECK(std::abs(approx - exact[i]) <= 1e-6 * (1.0 + std::abs(exact[i])));
        }
      }
    }
  }
}

TEST_CASE("composed derivative maps of words") {
  auto alph1 = Alphabet::get(2, 1);
  PolyVectorField<double> f;
  f.e = f.d = 1;
  f.comp = {{Polynomial<double>::variable(1, 0)}};

  auto id = build_F_w(f, *alph1, Word{});
  CHECK(id.size() == 1);
  CHECK(id[0] == Polynomial<double>::variable(1, 0));

  auto f1 = build_F_w(f, *alph1, Word{1});
  CHECK(f1[0] == f.comp[0][0]);

  // f(y) = y: each extra derivative step reproduces y
  auto f11 = build_F_w(f, *alph1, Word{1, 1});
  CHECK(f11[0] == Polynomial<double>::variable(1, 0));

  auto alph = Alphabet::get(2, 2);
  auto g = square_field();
  g.d = 2;
  g.comp.push_back({dpoly(1, {{{1}, 3.0}})});  // f2(y) = 3y
  auto s1 = build_F_w(g, *alph, Word{1});
  CHECK(s1[0] == g.comp[0][0]);
  auto s2 = build_F_w(g, *alph, Word{2});
  CHECK(s2[0] == g.comp[1][0]);
  // first letter feeds the innermost derivative: F^{(1,2)} = d(f2)(f1) = 3 y^2
  auto s12 = build_F_w(g, *alph, Word{1, 2});
  CHECK(s12[0] == dpoly(1, {{{2}, 3.0}}));
  // and the reverse order gives d(f1)(f2) = 2y * 3y
  auto s21 = build_F_w(g, *alph, Word{2, 1});
  CHECK(s21[0] == dpoly(1, {{{2}, 6.0}}));

  CHECK_THROWS_AS((void)build_F_w(g, *alph, Word{1, 1, 1}, 2), std::invalid_argument);
}

TEST_CASE("lip gamma estimates") {
  PolyVectorField<double> zero;
  zero.e = zero.d = 1;
  zero.comp = {{Polynomial<double>(1)}};
  zero.box = {{-1.0, 1.0}};
  CHECK(lip_gamma_norm(zero, 1.5).value == 0.0);

  PolyVectorField<double> lin;
  lin.e = lin.d = 1;
  lin.comp = {{Polynomial<double>::variable(1, 0)}};
  lin.box = {{-1.0, 1.0}};
  auto est = lip_gamma_norm(lin, 2.0);
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.derivative_sups.size() == 3);
  CHECK(est.derivative_sups[2] == 0.0);

  // cubic on [0,1], gamma 2.5: sups 1, 3, 6, and a 1/2-Hoelder quotient of 6y
  PolyVectorField<double> cub;
  cub.e = cub.d = 1;
  cub.comp = {{dpoly(1, {{{3}, 1.0}})}};
  cub.box = {{0.0, 1.0}};
  auto e25 = lip_gamma_norm(cub, 2.5);
  CHECK(e25.derivative_sups[0] == doctest::Approx(1.0));
  CHECK(e25.derivative_sups[1] == doctest::Approx(3.0));
  CHECK(e25.derivative_sups[2] == doctest::Approx(6.0));
  CHECK(e25.top_holder == doctest::Approx(6.0));
  CHECK(e25.value == doctest::Approx(6.0));
  auto e25fine = lip_gamma_norm(cub, 2.5, 16);
  CHECK(std::abs(e25fine.value - e25.value) <= 0.01 * e25.value);

  PolyVectorField<double> sq = square_field();
  auto small = lip_gamma_norm(sq, 2.0);
  auto big = sq;
  big.box = {{-2.0, 2.0}};
  CHECK(lip_gamma_norm(big, 2.0).value >= small.value);
  for (double gamma : {1.0, 2.0, 3.0}) {
    auto r8 = lip_gamma_norm(sq, gamma, 8);
    auto r16 = lip_gamma_norm(sq, gamma, 16);
    CHECK(std::abs(r16.value - r8.value) <= 0.01 * std::max(1.0, r8.value));
  }

  CHECK_THROWS_AS((void)lip_gamma_norm(sq, 0.0), std::invalid_argument);
  PolyVectorField<double> nobox = sq;
  nobox.box.clear();
  CHECK_THROWS_AS((void)lip_gamma_norm(nobox, 1.0), std::invalid_argument);
}

TEST_CASE("ode solve closed forms") {
  // dy = y dx along a straight unit increment: y(1) = e
  PolyVectorField<double> lin;
  lin.e = lin.d = 1;
  lin.comp = {{Polynomial<double>::variable(1, 0)}};
  lin.box = {{-0.5, 3.0}};
  PiecewiseLinearPath<double> x({0.0, 1.0}, {{0.0}, {1.0}});
  auto sol = ode_solve(lin, {1.0}, x);
  CHECK(sol.times.back() == 1.0);
  CHECK(std::abs(sol.states.back()[0] - std::exp(1.0)) <= 1e-9);

  // constant fields integrate to xi + sum_j A_j dx^j
  PolyVectorField<double> cst;
  cst.e = 2;
  cst.d = 2;
  cst.comp = {{Polynomial<double>::constant(2, 1.0), Polynomial<double>::constant(2, 2.0)},
              {Polynomial<double>::constant(2, -1.0), Polynomial<double>::constant(2, 0.5)}};
  cst.box = {{-5.0, 5.0}, {-5.0, 5.0}};
  PiecewiseLinearPath<double> x2({0.0, 0.5, 1.0}, {{0.0, 0.0}, {0.3, -0.2}, {0.7, 0.1}});
  auto sol2 = ode_solve(cst, {0.1, 0.2}, x2);
  CHECK(sol2.states.back()[0] == doctest::Approx(0.1 + 1.0 * 0.7 + (-1.0) * 0.1).epsilon(1e-13));
  CHECK(sol2.states.back()[1] == doctest::Approx(0.2 + 2.0 * 0.7 + 0.5 * 0.1).epsilon(1e-13));

  // constant driver: solution never moves
  auto xc = PiecewiseLinearPath<double>::constant(std::vector<double>{0.4}, 0.0, 2.0);
  auto solc = ode_solve(lin, {0.25}, xc);
  for (const auto& st : solc.states) CHECK(st[0] == 0.25);

  // reversal brings the state back
  std::mt19937_64 rng(17);
  auto f = rand_field(rng, 2, 2, 0.4, 4.0);
  auto drv = rand_driver(rng, 2, 3, 0.4);
  std::vector<double> xi = {0.1, -0.2};
  auto fwd = ode_solve(f, xi, drv, 1e-12);
  auto back = ode_solve(f, fwd.states.back(), drv.reversed(), 1e-12);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(back.states.back()[i] - xi[i]) <= 1e-8);

  // substep output refines the grid
  auto sub = ode_solve(lin, {1.0}, x, 1e-10, 4);
  CHECK(sub.times.size() == 5);
  CHECK(sub.times[1] == doctest::Approx(0.25));
  CHECK(std::abs(sub.states[2][0] - std::exp(0.5)) <= 1e-9);
}

TEST_CASE("ode solve leaves the box") {
  PolyVectorField<double> one;
  one.e = one.d = 1;
  one.comp = {{Polynomial<double>::constant(1, 1.0)}};
  one.box = {{-1.0, 1.0}};
  PiecewiseLinearPath<double> x({0.0, 1.0}, {{0.0}, {2.0}});
  CHECK_THROWS_AS((void)ode_solve(one, {0.0}, x), std::runtime_error);

  // same drive inside a big enough box is fine
  one.box = {{-1.0, 3.0}};
  CHECK(ode_solve(one, {0.0}, x).states.back()[0] == doctest::Approx(2.0));
}

TEST_CASE("ode estimate report on identical systems") {
  std::mt19937_64 rng(5);
  auto f = rand_field(rng, 2, 2, 0.3, 4.0);
  auto x = rand_driver(rng, 2, 3, 0.3);
  std::vector<double> y0 = {0.1, 0.0};
  auto rep = check_ode_estimates(f, f, x, x, y0, y0);
  CHECK(rep.lhs1 == 0.0);
  CHECK(rep.lhs2 == 0.0);
  CHECK(rep.pass);
}

TEST_CASE("ode estimate with a frozen driver") {
  std::mt19937_64 rng(1);
  auto f = rand_field(rng, 2, 2, 0.3, 4.0);
  auto x = rand_driver(rng, 2, 4, 0.3);
  auto xt = PiecewiseLinearPath<double>::constant(std::vector<double>(2, 0.0), x.times().front(),
                                                  x.times().back());
  std::vector<double> y0 = {0.05, -0.1};
  auto rep = check_ode_estimates(f, f, x, xt, y0, y0);
  CHECK(rep.pass);
  CHECK(rep.lhs1 > 0.0);
  double mdx = 0.0;
  for (int j = 0; j < 2; ++j) mdx += rep.M[j] * to_double(x.one_variation(j));
  CHECK(rep.lhs1 <= mdx * rep.exp_factor * (1.0 + 1e-6));
}

TEST_CASE("ode estimates hold on random instances") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 10; ++rep) {
    int e = 1 + static_cast<int>(rng() % 2);
    int d = 1 + static_cast<int>(rng() % 3);
    auto f = rand_field(rng, e, d, 0.3, 4.0);
    auto ft = f;
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < e; ++i) {
        auto bump = rand_poly(rng, e, 2, 0.05);
        ft.comp[a][i] += bump;
      }
    auto x = rand_driver(rng, d, 3, 0.3);
    auto xt = rand_driver(rng, d, 4, 0.3);
    auto y0 = rand_point(rng, e, 0.2);
    auto y0t = y0;
    y0t[0] += 0.05;
    auto r = check_ode_estimates(f, ft, x, xt, y0, y0t);
    CAPTURE(rep);
    CHECK(r.pass);
    CHECK(r.lhs1 <= r.rhs1 * (1.0 + 1e-6));
    CHECK(r.lhs2 <= r.rhs2 * (1.0 + 1e-6));
  }
}

TEST_CASE("ode estimate input validation") {
  std::mt19937_64 rng(3);
  auto f = rand_field(rng, 2, 2, 0.3, 4.0);
  auto x = rand_driver(rng, 2, 2, 0.2);
  auto g = f;
  g.box = {{-3.0, 3.0}, {-3.0, 3.0}};
  std::vector<double> y0 = {0.0, 0.0};
  CHECK_THROWS_AS((void)check_ode_estimates(f, g, x, x, y0, y0), std::invalid_argument);
  PiecewiseLinearPath<double> shifted({0.0, 0.5}, {{0.0, 0.0}, {0.1, 0.1}});
  CHECK_THROWS_AS((void)check_ode_estimates(f, f, x, shifted, y0, y0), std::invalid_argument);
}
