#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "brp/words.hpp"

namespace brp {

template <class S>
struct RealizeResult {
  PiecewiseLinearPath<S> path;
  double lie_residual = 0.0;  // of log h against the Lyndon row span
};

namespace detail {

template <class S>
S scalar_from_double(double x) {
  if constexpr (std::is_same_v<S, Rational>)
    return rational_from_double(x);
  else
    return S(x);
}

// Segment increments realizing exp(c * bracket(l)) up to terms of degree
// above deg(l): a single letter is an axis chord, a composite Lyndon word
// is the group commutator of its standard factors. The scale split is
// balanced, |c|^{deg u / deg l} against |c|^{deg v / deg l}, but the split
// point is taken rational so the product of the factors is exactly c.
template <class S>
void bracket_segments(const Alphabet& alph, const Word& l, const S& c,
                      std::vector<std::vector<S>>& out) {
  if (l.size() == 1) {
    std::vector<S> inc(alph.K(), S(0));
    inc[l[0] - 1] = c;
    out.push_back(std::move(inc));
    return;
  }
  auto [u, v] = standard_factorization(l);
  const int du = alph.word_degree(u);
  const int dl = alph.word_degree(l);
  double mag = std::pow(std::abs(to_double(c)), static_cast<double>(du) / dl);
  if (!std::isfinite(mag) || mag == 0.0) mag = 1.0;
  S a = detail::scalar_from_double<S>(to_double(c) < 0 ? -mag : mag);
  S b = c / a;

  std::size_t i0 = out.size();
  bracket_segments(alph, u, a, out);
  std::size_t i1 = out.size();
  bracket_segments(alph, v, b, out);
  std::size_t i2 = out.size();
  auto reverse_negated = [&out](std::size_t lo, std::size_t hi) {
    for (std::size_t i = hi; i-- > lo;) {
      std::vector<S> inc = out[i];
      for (auto& x : inc) x = -x;
      out.push_back(std::move(inc));
    }
  };
  reverse_negated(i0, i1);
  reverse_negated(i1, i2);
}

template <class S>
PiecewiseLinearPath<S> path_from_increments(int dim, const std::vector<std::vector<S>>& incs) {
  if (incs.empty()) return PiecewiseLinearPath<S>::constant(std::vector<S>(dim, S(0)));
  std::vector<S> times(incs.size() + 1);
  std::vector<std::vector<S>> pts(incs.size() + 1, std::vector<S>(dim, S(0)));
  for (std::size_t i = 0; i < incs.size(); ++i) {
    times[i + 1] = S(static_cast<int>(i + 1)) / S(static_cast<int>(incs.size()));
    for (int j = 0; j < dim; ++j) pts[i + 1][j] = pts[i][j] + incs[i][j];
  }
  times[0] = S(0);
  return PiecewiseLinearPath<S>(std::move(times), std::move(pts));
}

template <class S>
void check_lie(const LyndonDecomposition<S>& dec, double lie_tol) {
  if constexpr (std::is_same_v<S, Rational>) {
    if (!dec.exact_member && !(dec.max_residual <= lie_tol))
      throw std::invalid_argument("realize: logarithm is not a Lie element");
  } else {
    if (!(dec.max_residual <= lie_tol))
      throw std::invalid_argument("realize: logarithm is not a Lie element");
  }
}

}  // namespace detail

// Path whose truncated signature equals h. Built degree by degree: a single
// chord carries the degree-one part, then each level's remaining discrepancy
// is Lie at that level and is burned off by Lyndon bracket loops, which
// never disturb the levels already matched. Exact over rationals.
template <class S>
RealizeResult<S> realize(const WordSeries<S>& h, double lie_tol = 0.0) {
  const auto& alph = h.alphabet();
  const int n = h.truncation();
  if (!(h.coeff(Word{}) == S(1)))
    throw std::invalid_argument("realize: empty-word coefficient must be 1");

  auto dec = lyndon_decompose(word_log(h));
  detail::check_lie(dec, lie_tol);

  std::vector<std::vector<S>> incs;
  WordSeries<S> g = WordSeries<S>::unit(alph, n);
  for (int m = 1; m <= n; ++m) {
    auto r = word_log(concat_product(group_inverse(g), h)).graded_part(m);
    std::vector<std::vector<S>> level;
    if (m == 1) {
      std::vector<S> chord(alph->K(), S(0));
      bool any = false;
      for (int j = 1; j <= alph->K(); ++j) {
        if (alph->weight(j) != 1) continue;
        chord[j - 1] = r.coeff(Word{j});
        if (!(chord[j - 1] == S(0))) any = true;
      }
      if (any) level.push_back(std::move(chord));
    } else {
      const auto& words = alph->words_of_degree(m);
      std::vector<S> t(words.size(), S(0));
      for (std::size_t i = 0; i < words.size(); ++i) t[i] = r.coeff(words[i]);
      auto c = alph->lie_solve(m, t, nullptr);
      const auto& lw = alph->lyndon_of_degree(m);
      for (std::size_t i = 0; i < lw.size(); ++i) {
        if (c[i] == S(0)) continue;
        detail::bracket_segments(*alph, lw[i], c[i], level);
      }
    }
    if (level.empty()) continue;
    auto piece = detail::path_from_increments<S>(alph->K(), level);
    g = concat_product(g, signature(piece, alph, n));
    for (auto& inc : level) incs.push_back(std::move(inc));
  }

  RealizeResult<S> out{detail::path_from_increments<S>(alph->K(), incs), dec.max_residual};
  return out;
}

// Paths x1, x2 with S(xi) = hi whose 1-variation distance is of order delta
// when the inputs are delta-close coefficient-wise. Both start with the same
// realization y of h1; the quotient g = h1^{-1} h2 is produced by the block
// z_mu followed by reversed z, where z_mu dilates component j of z by
// mu^{weight(j)} and mu^n = 1 + O(delta). Solving for z degree by degree
// keeps everything exact: the new degree-m unknown enters the target only
// through the factor mu^m - 1.
template <class S>
std::pair<PiecewiseLinearPath<S>, PiecewiseLinearPath<S>> realize_pair(
    const WordSeries<S>& h1, const WordSeries<S>& h2, double delta, double lie_tol = 0.0) {
  h1.check_compatible(h2);
  const auto& alph = h1.alphabet();
  const int n = h1.truncation();

  auto diff = h1;
  diff -= h2;
  for (const auto& [w, v] : diff.terms())
    if (std::abs(to_double(v)) > delta * (1 + 1e-12))
      throw std::invalid_argument("realize_pair: inputs are not delta-close");

  auto y = realize(h1, lie_tol).path;
  if (diff.terms().empty()) return {y, y};

  S mu = detail::scalar_from_double<S>(std::pow(1.0 + delta, 1.0 / n));
  if (mu == S(1)) throw std::invalid_argument("realize_pair: delta too small to resolve");
  std::vector<S> mu_pow(n + 1, S(1));
  for (int m = 1; m <= n; ++m) mu_pow[m] = mu_pow[m - 1] * mu;

  auto lq = word_log(concat_product(group_inverse(h1), h2));
  WordSeries<S> P(alph, n);
  for (int m = 1; m <= n; ++m) {
    auto ep = word_exp(P);
    auto cur = word_log(concat_product(dilation(ep, mu), group_inverse(ep))).graded_part(m);
    auto want = lq.graded_part(m);
    want -= cur;
    want *= S(1) / (mu_pow[m] - S(1));
    P += want;
  }

  auto z = realize(word_exp(P), lie_tol).path;
  std::vector<S> fac(alph->K());
  for (int j = 1; j <= alph->K(); ++j) fac[j - 1] = mu_pow[alph->weight(j)];
  auto zr = z.reversed();
  return {y.concat(z).concat(zr), y.concat(z.scale_components(fac)).concat(zr)};
}

// Group-like element on the grafting side, realized through the word group.
template <class S>
RealizeResult<S> realize_gl(const std::shared_ptr<const Alphabet>& alph, const ForestPoly<S>& g,
                            double lie_tol = 0.0) {
  return realize(phi_inverse(alph, g, alph->n()), lie_tol);
}

}  // namespace brp
