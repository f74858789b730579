#include <random>

#include "brp/realize.hpp"
#include "doctest.h"

using namespace brp;

namespace {

Rational small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-4, 4);
  std::uniform_int_distribution<int> den(1, 3);
  return Rational(num(rng)) / den(rng);
}

// random group element: exponential of a random Lie combination
WordSeries<Rational> random_group_element(std::mt19937_64& rng,
                                          const std::shared_ptr<const Alphabet>& alph, int n) {
  WordSeries<Rational> lie(alph, n);
  for (int m = 1; m <= n; ++m)
    for (const auto& l : alph->lyndon_of_degree(m)) {
      Rational c = small_rational(rng);
      if (c == 0) continue;
      for (const auto& [w, b] : bracket_expansion(l)) lie.set(w, lie.coeff(w) + c * b);
    }
  return word_exp(lie);
}

}  // namespace

TEST_CASE("realize unit and single letters") {
  auto alph = Alphabet::get(2, 2);
  auto unit = WordSeries<Rational>::unit(alph, 2);
  auto r = realize(unit);
  CHECK(r.path.segment_count() == 1);
  CHECK(r.path.one_variation_total() == 0);
  CHECK(signature(r.path, alph, 2) == unit);

  // exp(c e_j) comes out as one straight axis segment of length |c|
  for (int j = 1; j <= alph->K(); ++j) {
    WordSeries<Rational> lie(alph, 2);
    Rational c = Rational(-7) / 4;
    lie.set(Word{j}, c);
    auto h = word_exp(lie);
    auto res = realize(h);
    CHECK(res.path.segment_count() == 1);
    CHECK(res.path.one_variation(j - 1) == abs_val(c));
    CHECK(res.path.one_variation_total() == abs_val(c));
    CHECK(signature(res.path, alph, 2) == h);
  }
}

TEST_CASE("realize a pure area element as a commutator loop") {
  auto alph = Alphabet::get(2, 2);
  WordSeries<Rational> lie(alph, 2);
  Rational c = Rational(9) / 16;
  lie.set(Word{1, 2}, c);
  lie.set(Word{2, 1}, -c);  // c [e1, e2]
  auto h = word_exp(lie);
  auto res = realize(h);
  CHECK(res.path.segment_count() == 4);
  CHECK(signature(res.path, alph, 2) == h);

  // balanced scale split: each leg has length near sqrt(c)
  double leg = to_double(res.path.one_variation(0)) / 2;
  CHECK(leg == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(res.path.one_variation(0) * res.path.one_variation(1) == 4 * c);
}

TEST_CASE("realize round-trips exactly over rationals") {
  std::mt19937_64 rng(314);
  for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 1}}) {
    auto alph = Alphabet::get(n, d);
    for (int rep = 0; rep < 6; ++rep) {
      auto h = random_group_element(rng, alph, n);
      auto res = realize(h);
      CHECK(res.lie_residual == 0.0);
      CHECK(signature(res.path, alph, n) == h);
    }
  }
}

TEST_CASE("realize round-trips in floating point") {
  std::mt19937_64 rng(2718);
  auto alph = Alphabet::get(3, 2);
  for (int rep = 0; rep < 10; ++rep) {
    auto hr = random_group_element(rng, alph, 3);
    WordSeries<double> h(alph, 3);
    for (const auto& [w, v] : hr.terms()) h.set(w, to_double(v));
    auto res = realize(h, 1e-9);
    auto back = signature(res.path, alph, 3);
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m)
      for (const auto& w : alph->words_of_degree(m))
        worst = std::max(worst, std::abs(back.coeff(w) - h.coeff(w)));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("realize rejects non-group input") {
  auto alph = Alphabet::get(2, 2);
  auto bad = WordSeries<Rational>::unit(alph, 2);
  bad.set(Word{1, 1}, Rational(1));  // symmetric level-2 part without its square source
  CHECK_THROWS_AS(realize(bad), std::invalid_argument);

  WordSeries<Rational> no_unit(alph, 2);
  CHECK_THROWS_AS(realize(no_unit), std::invalid_argument);
}

TEST_CASE("realize gl group-like elements") {
  auto alph = Alphabet::get(2, 2);
  auto unit_gl = ForestPoly<Rational>::unit(alph->basis());
  auto r = realize_gl(alph, unit_gl);
  CHECK(signature(r.path, alph, 2) == WordSeries<Rational>::unit(alph, 2));

  std::mt19937_64 rng(55);
  for (int rep = 0; rep < 5; ++rep) {
    auto h = random_group_element(rng, alph, 2);
    auto g = phi(h);
    REQUIRE(is_group_like(g, 0.0, nullptr));
    auto res = realize_gl(alph, g);
    CHECK(phi(signature(res.path, alph, 2)).coeffs() == g.coeffs());
  }
}

TEST_CASE("uniform variation constant over a norm ball") {
  std::mt19937_64 rng(808);
  auto alph = Alphabet::get(2, 2);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    auto h = random_group_element(rng, alph, 2);
    while (group_norm(h) > 2.0) h = dilation(h, Rational(1) / 2);
    auto res = realize(h);
    worst = std::max(worst, to_double(res.path.one_variation_total()));
  }
  CHECK(worst > 0.0);
  CHECK(worst < 100.0);  // single constant over the ball, far from tight
}

TEST_CASE("realize pair identical inputs") {
  auto alph = Alphabet::get(2, 2);
  std::mt19937_64 rng(11);
  auto h = random_group_element(rng, alph, 2);
  auto [x1, x2] = realize_pair(h, h, 0.5);
  CHECK(x1.times() == x2.times());
  CHECK(x1.points() == x2.points());
}

TEST_CASE("realize pair exactness and closeness") {
  std::mt19937_64 rng(616);
  auto alph = Alphabet::get(2, 2);
  for (int rep = 0; rep < 5; ++rep) {
    auto h1 = random_group_element(rng, alph, 2);
    double delta = 1e-3;
    // perturb every Lyndon coordinate by at most delta/8 to stay delta-close
    WordSeries<Rational> lie = word_log(h1);
    for (int m = 1; m <= 2; ++m)
      for (const auto& l : alph->lyndon_of_degree(m)) {
        Rational eps = small_rational(rng) * rational_from_double(delta / 64);
        for (const auto& [w, b] : bracket_expansion(l)) lie.set(w, lie.coeff(w) + eps * b);
      }
    auto h2 = word_exp(lie);
    auto [x1, x2] = realize_pair(h1, h2, delta);
    CHECK(signature(x1, alph, 2) == h1);
    CHECK(signature(x2, alph, 2) == h2);
    CHECK(x1.times() == x2.times());
    double dist = to_double(x1.difference(x2).one_variation_total());
    CHECK(dist <= 50 * delta);
  }
}

TEST_CASE("realize pair ratio is stable across the delta sweep") {
  std::mt19937_64 rng(999);
  auto alph = Alphabet::get(2, 2);
  auto h1 = random_group_element(rng, alph, 2);
  auto lie = word_log(h1);

  std::vector<double> ratios;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    auto lie2 = lie;
    Rational eps = rational_from_double(delta / 16);
    lie2.set(Word{1}, lie2.coeff(Word{1}) + eps);
    lie2.set(Word{1, 2}, lie2.coeff(Word{1, 2}) + eps / 2);
    lie2.set(Word{2, 1}, lie2.coeff(Word{2, 1}) - eps / 2);
    auto h2 = word_exp(lie2);
    auto [x1, x2] = realize_pair(h1, h2, delta);
    CHECK(signature(x1, alph, 2) == h1);
    CHECK(signature(x2, alph, 2) == h2);
    ratios.push_back(to_double(x1.difference(x2).one_variation_total()) / delta);
  }
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(lo > 0.0);
  CHECK(hi / lo < 2.0);
}

TEST_CASE("realize pair shares the first block when lower parts agree") {
  auto alph = Alphabet::get(2, 2);
  WordSeries<Rational> lie(alph, 2);
  lie.set(Word{1}, Rational(1) / 2);
  lie.set(Word{2}, Rational(-1) / 3);
  Rational area = Rational(3) / 4;
  lie.set(Word{1, 2}, area);
  lie.set(Word{2, 1}, -area);
  auto h1 = word_exp(lie);

  double delta = 1e-2;
  auto lie2 = lie;
  Rational eps = rational_from_double(delta / 4);
  lie2.set(Word{1, 2}, area + eps);
  lie2.set(Word{2, 1}, -area - eps);
  auto h2 = word_exp(lie2);

  auto [x1, x2] = realize_pair(h1, h2, delta);
  CHECK(signature(x1, alph, 2) == h1);
  CHECK(signature(x2, alph, 2) == h2);

  // both paths start with the same realization of h1, point for point
  auto y = realize(h1).path;
  for (std::size_t i = 0; i < y.points().size(); ++i) CHECK(x1.points()[i] == y.points()[i]);
  for (std::size_t i = 0; i < y.points().size(); ++i) CHECK(x2.points()[i] == y.points()[i]);
}

TEST_CASE("realize pair rejects far inputs") {
  auto alph = Alphabet::get(2, 2);
  WordSeries<Rational> lie(alph, 2);
  lie.set(Word{1}, Rational(1));
  auto h1 = word_exp(lie);
  lie.set(Word{1}, Rational(2));
  auto h2 = word_exp(lie);
  CHECK_THROWS_AS(realize_pair(h1, h2, 1e-3), std::invalid_argument);
}
