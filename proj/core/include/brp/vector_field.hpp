#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "brp/forest.hpp"
#include "brp/polynomial.hpp"
#include "brp/words.hpp"

namespace brp {

// f: R^e -> L(R^d, R^e) with polynomial entries; comp[a-1] is the direction
// field f_a as e coordinate polynomials. The box bounds all norm estimation
// (sup norms over R^e are not computable; every report uses this same box).
template <class S>
struct PolyVectorField {
  int e = 0;
  int d = 0;
  std::vector<PolyMap<S>> comp;
  std::vector<std::pair<double, double>> box;

  void validate() const {
    if (e <= 0 || d <= 0) throw std::invalid_argument("field: dimensions must be positive");
    if (static_cast<int>(comp.size()) != d)
      throw std::invalid_argument("field: direction count mismatch");
    for (const auto& m : comp) {
      if (static_cast<int>(m.size()) != e)
        throw std::invalid_argument("field: coordinate count mismatch");
      for (const auto& p : m)
        if (p.vars() != e) throw std::invalid_argument("field: polynomial arity mismatch");
    }
    if (!box.empty() && static_cast<int>(box.size()) != e)
      throw std::invalid_argument("field: box arity mismatch");
    for (const auto& [lo, hi] : box)
      if (!(lo < hi)) throw std::invalid_argument("field: empty box interval");
  }

  std::vector<S> eval(int a, const std::vector<S>& y) const {
    if (a < 1 || a > d) throw std::invalid_argument("field: label out of range");
    return eval_map(comp[a - 1], y);
  }

  PolyVectorField restriction(int a) const {
    if (a < 1 || a > d) throw std::invalid_argument("field: label out of range");
    return PolyVectorField{e, 1, {comp[a - 1]}, box};
  }

  PolyVectorField difference(const PolyVectorField& o) const {
    if (e != o.e || d != o.d) throw std::invalid_argument("field: dimension mismatch");
    PolyVectorField out = *this;
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < e; ++i) out.comp[a][i] -= o.comp[a][i];
    return out;
  }
};

namespace detail {

// (d^k p)(dirs[0], ..., dirs[k-1]) with the directions held fixed: every
// partial lands on p, never on a direction.
template <class S>
S contract_derivative(const Polynomial<S>& p, const std::vector<S>& y,
                      const std::vector<std::vector<S>>& dirs, std::size_t m = 0) {
  if (m == dirs.size()) return p.eval(y);
  S acc(0);
  for (int j = 0; j < p.vars(); ++j) {
    if (dirs[m][j] == S(0)) continue;
    auto pj = p.partial(j);
    if (pj.is_zero()) continue;
    acc += contract_derivative(pj, y, dirs, m + 1) * dirs[m][j];
  }
  return acc;
}

template <class S>
Polynomial<S> contract_derivative_poly(const Polynomial<S>& p,
                                       const std::vector<PolyMap<S>>& dirs, std::size_t m = 0) {
  if (m == dirs.size()) return p;
  Polynomial<S> acc(p.vars());
  for (int j = 0; j < p.vars(); ++j) {
    auto pj = p.partial(j);
    if (pj.is_zero() || dirs[m][j].is_zero()) continue;
    acc += contract_derivative_poly(pj, dirs, m + 1) * dirs[m][j];
  }
  return acc;
}

}  // namespace detail

// f(tau) evaluated at y: f(.a) = f_a, f([t1...tk]a) = (d^k f_a)(f(t1)...f(tk)).
template <class S>
std::vector<S> elementary_differential(const PolyVectorField<S>& f, const Tree& t,
                                       const std::vector<S>& y) {
  if (t.label() < 1 || t.label() > f.d)
    throw std::invalid_argument("elementary_differential: label out of range");
  std::vector<std::vector<S>> dirs;
  for (const auto& child : t.children()) dirs.push_back(elementary_differential(f, child, y));
  std::vector<S> out(f.e, S(0));
  for (int i = 0; i < f.e; ++i)
    out[i] = detail::contract_derivative(f.comp[t.label() - 1][i], y, dirs);
  return out;
}

// same contraction carried out symbolically
template <class S>
PolyMap<S> elementary_differential_poly(const PolyVectorField<S>& f, const Tree& t) {
  if (t.label() < 1 || t.label() > f.d)
    throw std::invalid_argument("elementary_differential: label out of range");
  std::vector<PolyMap<S>> dirs;
  for (const auto& child : t.children()) dirs.push_back(elementary_differential_poly(f, child));
  PolyMap<S> out;
  out.reserve(f.e);
  for (int i = 0; i < f.e; ++i)
    out.push_back(detail::contract_derivative_poly(f.comp[t.label() - 1][i], dirs));
  return out;
}

// F^empty = identity; F^(k1 w') = dF^(w') applied to f(nu_{k1}).
template <class S>
PolyMap<S> build_F_w(const PolyVectorField<S>& f, const Alphabet& alph, const Word& w,
                     int degree_budget = std::numeric_limits<int>::max()) {
  if (f.d != alph.d()) throw std::invalid_argument("build_F_w: label counts differ");
  if (alph.word_degree(w) > degree_budget)
    throw std::invalid_argument("build_F_w: degree budget exceeded");
  if (w.empty()) return identity_map<S>(f.e);
  Word rest(w.begin() + 1, w.end());
  PolyMap<S> u = build_F_w(f, alph, rest);
  PolyMap<S> g = elementary_differential_poly(f, alph.basis()->trees()[alph.generator_tree(w[0])]);
  PolyMap<S> out;
  out.reserve(f.e);
  for (int i = 0; i < f.e; ++i) {
    Polynomial<S> acc(f.e);
    for (int j = 0; j < f.e; ++j) {
      auto pj = u[i].partial(j);
      if (pj.is_zero() || g[j].is_zero()) continue;
      acc += pj * g[j];
    }
    out.push_back(std::move(acc));
  }
  return out;
}

struct LipGammaEstimate {
  double gamma = 0.0;
  double value = 0.0;
  int grid_resolution = 0;
  std::vector<double> derivative_sups;  // orders 0..floor(gamma)
  double top_holder = 0.0;              // {gamma}-quotient of the top derivative
};

namespace detail {

inline std::vector<std::vector<double>> box_grid(
    const std::vector<std::pair<double, double>>& box, int resolution) {
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(box.size(), 0);
  for (;;) {
    std::vector<double> y(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) {
      auto [lo, hi] = box[j];
      y[j] = lo + (hi - lo) * idx[j] / resolution;
    }
    pts.push_back(std::move(y));
    std::size_t j = 0;
    while (j < box.size() && ++idx[j] > resolution) idx[j++] = 0;
    if (j == box.size()) break;
  }
  return pts;
}

// all order-k partial derivative polynomials of every entry of f, flattened
inline std::vector<Polynomial<double>> derivative_tensor(const PolyVectorField<double>& f,
                                                         int k) {
  std::vector<Polynomial<double>> flat;
  for (int a = 0; a < f.d; ++a)
    for (int i = 0; i < f.e; ++i) {
      std::vector<Polynomial<double>> level = {f.comp[a][i]};
      for (int o = 0; o < k; ++o) {
        std::vector<Polynomial<double>> next;
        for (const auto& p : level)
          for (int j = 0; j < f.e; ++j) next.push_back(p.partial(j));
        level = std::move(next);
      }
      for (auto& p : level) flat.push_back(std::move(p));
    }
  return flat;
}

}  // namespace detail

// Grid estimate of the Lip(gamma) norm on the field's box: sup Frobenius
// norms of derivative orders 0..floor(gamma), plus the fractional Hoelder
// quotient of the top order over grid pairs at separation >= 1e-3.
inline LipGammaEstimate lip_gamma_norm(const PolyVectorField<double>& f, double gamma,
                                       int resolution = 8) {
  f.validate();
  if (!(gamma > 0)) throw std::invalid_argument("lip_gamma_norm: gamma must be positive");
  if (f.box.empty()) throw std::invalid_argument("lip_gamma_norm: field has no box");
  const int k = static_cast<int>(std::floor(gamma));
  const double frac = gamma - k;

  LipGammaEstimate est;
  est.gamma = gamma;
  est.grid_resolution = resolution;
  auto grid = detail::box_grid(f.box, resolution);

  std::vector<std::vector<double>> top_values(grid.size());
  for (int order = 0; order <= k; ++order) {
    auto tensor = detail::derivative_tensor(f, order);
    bool constant_tensor = true;
    for (const auto& p : tensor) constant_tensor = constant_tensor && p.degree() == 0;
    double sup = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double sq = 0.0;
      std::vector<double> vals(tensor.size());
      for (std::size_t i = 0; i < tensor.size(); ++i) {
        vals[i] = tensor[i].eval(grid[g]);
        sq += vals[i] * vals[i];
      }
      sup = std::max(sup, std::sqrt(sq));
      if (order == k) top_values[g] = std::move(vals);
      if (constant_tensor && order < k) break;
    }
    est.derivative_sups.push_back(sup);

    if (order == k && !constant_tensor) {
      for (std::size_t g1 = 0; g1 < grid.size(); ++g1)
        for (std::size_t g2 = g1 + 1; g2 < grid.size(); ++g2) {
          double dist2 = 0.0;
          for (std::size_t j = 0; j < grid[g1].size(); ++j) {
            double dd = grid[g1][j] - grid[g2][j];
            dist2 += dd * dd;
          }
          double dist = std::sqrt(dist2);
          if (dist < 1e-3) continue;
          double diff2 = 0.0;
          for (std::size_t i = 0; i < top_values[g1].size(); ++i) {
            double dd = top_values[g1][i] - top_values[g2][i];
            diff2 += dd * dd;
          }
          double q = std::sqrt(diff2) / std::pow(dist, frac);
          est.top_holder = std::max(est.top_holder, q);
        }
    }
  }
  est.value = est.top_holder;
  for (double s : est.derivative_sups) est.value = std::max(est.value, s);
  return est;
}

inline double sup_norm(const PolyVectorField<double>& f, int resolution = 8) {
  f.validate();
  if (f.box.empty()) throw std::invalid_argument("sup_norm: field has no box");
  auto grid = detail::box_grid(f.box, resolution);
  double sup = 0.0;
  for (const auto& y : grid) {
    for (int a = 1; a <= f.d; ++a) {
      auto v = f.eval(a, y);
      double sq = 0.0;
      for (double c : v) sq += c * c;
      sup = std::max(sup, std::sqrt(sq));
    }
  }
  return sup;
}

}  // namespace brp
