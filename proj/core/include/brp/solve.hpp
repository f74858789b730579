#pragma once

#include "brp/ode.hpp"
#include "brp/realize.hpp"
#include "brp/rough_path.hpp"
#include "brp/vector_field.hpp"

namespace brp {

template <class S>
struct SolveReport {
  std::vector<std::size_t> indices;      // grid indices of the recorded states
  std::vector<std::vector<S>> states;    // y at those indices
};

// Path-side dilation: scales every degree-m tree coefficient by lambda^m.
// Group automorphism, so Chen survives; pairs with scaling f by 1/lambda.
template <class S>
BranchedRoughPath<S> dilate(const BranchedRoughPath<S>& X, const S& lambda) {
  const auto& basis = *X.basis();
  std::vector<Character<S>> states = X.states();
  std::vector<S> pw(static_cast<std::size_t>(X.N()) + 1, S(1));
  for (std::size_t m = 1; m < pw.size(); ++m) pw[m] = pw[m - 1] * lambda;
  for (auto& st : states)
    for (std::size_t ti = 0; ti < basis.trees().size(); ++ti)
      st.tree_value(static_cast<int>(ti)) *= pw[basis.trees()[ti].degree()];
  return BranchedRoughPath<S>(X.p(), X.basis(), X.grid(), std::move(states));
}

namespace detail {

template <class S>
void check_solver_box(const std::vector<S>& y,
                      const std::vector<std::pair<double, double>>& box, const char* who) {
  if (box.empty()) return;
  for (std::size_t j = 0; j < y.size(); ++j) {
    double v = to_double(y[j]);
    auto [lo, hi] = box[j];
    double margin = 1e-9 * (1.0 + std::abs(lo) + std::abs(hi));
    if (!std::isfinite(v) || v < lo - margin || v > hi + margin)
      throw std::runtime_error(std::string(who) + ": trajectory left the domain box");
  }
}

// per-tree data for one Euler step: elementary differential and 1/sigma
template <class S>
struct EulerTables {
  std::vector<PolyMap<S>> ed;
  std::vector<S> inv_sigma;
};

template <class S>
EulerTables<S> euler_tables(const PolyVectorField<S>& f, const HopfBasis& basis) {
  EulerTables<S> t;
  t.ed.reserve(basis.trees().size());
  t.inv_sigma.reserve(basis.trees().size());
  for (std::size_t ti = 0; ti < basis.trees().size(); ++ti) {
    t.ed.push_back(elementary_differential_poly(f, basis.trees()[ti]));
    t.inv_sigma.push_back(S(1) / S(static_cast<std::int64_t>(
                                     basis.sigma_tree(static_cast<int>(ti)))));
  }
  return t;
}

template <class S>
std::vector<S> euler_step(const EulerTables<S>& tab, const Character<S>& inc,
                          const std::vector<S>& y) {
  std::vector<S> out = y;
  for (std::size_t ti = 0; ti < tab.ed.size(); ++ti) {
    S w = inc.tree_value(static_cast<int>(ti)) * tab.inv_sigma[ti];
    if (w == S(0)) continue;
    auto v = eval_map(tab.ed[ti], y);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * v[i];
  }
  return out;
}

inline std::vector<std::size_t> full_index_range(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

template <class S>
void check_subgrid(const std::vector<std::size_t>& idx, const BranchedRoughPath<S>& X) {
  if (idx.size() < 2 || idx.front() != 0 || idx.back() != X.size() - 1)
    throw std::invalid_argument("solver: subgrid must run from the first to the last grid point");
  for (std::size_t k = 0; k + 1 < idx.size(); ++k)
    if (!(idx[k] < idx[k + 1])) throw std::invalid_argument("solver: subgrid must increase");
}

}  // namespace detail

// Branched Euler steps y_{k+1} = y_k + sum_tau (X_{t_k,t_{k+1}},tau)/sigma(tau) f(tau)(y_k).
// The 1/sigma weight matches the rescaled increments, so both backends target
// the same local model. Exact over rationals.
template <class S>
SolveReport<S> solve_euler(const BranchedRoughPath<S>& X, const PolyVectorField<S>& f,
                           const std::vector<S>& xi, std::vector<std::size_t> subgrid = {}) {
  f.validate();
  if (f.d != X.d()) throw std::invalid_argument("solve_euler: field labels must match the path");
  if (static_cast<int>(xi.size()) != f.e)
    throw std::invalid_argument("solve_euler: start point dimension mismatch");
  if (subgrid.empty()) subgrid = detail::full_index_range(X.size());
  detail::check_subgrid(subgrid, X);

  auto tab = detail::euler_tables(f, *X.basis());
  SolveReport<S> rep;
  rep.indices = subgrid;
  rep.states.push_back(xi);
  detail::check_solver_box(xi, f.box, "solve_euler");
  for (std::size_t k = 0; k + 1 < subgrid.size(); ++k) {
    auto inc = X.increment(subgrid[k], subgrid[k + 1]);
    rep.states.push_back(detail::euler_step(tab, inc, rep.states.back()));
    detail::check_solver_box(rep.states.back(), f.box, "solve_euler");
  }
  return rep;
}

// Geodesic backend: each increment is rescaled into the Grossman-Larson
// group, realized as a bounded variation path over the alphabet, and the
// interval is crossed by the ODE driven by the letter fields f(nu_j).
inline SolveReport<double> solve_geodesic(const BranchedRoughPath<double>& X,
                                          const PolyVectorField<double>& f,
                                          const std::vector<double>& xi,
                                          std::vector<std::size_t> subgrid = {},
                                          double lie_tol = 1e-6, double reltol = 1e-10) {
  f.validate();
  if (f.d != X.d())
    throw std::invalid_argument("solve_geodesic: field labels must match the path");
  if (static_cast<int>(xi.size()) != f.e)
    throw std::invalid_argument("solve_geodesic: start point dimension mismatch");
  if (subgrid.empty()) subgrid = detail::full_index_range(X.size());
  detail::check_subgrid(subgrid, X);

  auto alph = Alphabet::get(X.N(), X.d());
  std::vector<PolyMap<double>> letter_fields;
  letter_fields.reserve(alph->K());
  for (int j = 1; j <= alph->K(); ++j)
    letter_fields.push_back(
        elementary_differential_poly(f, alph->basis()->trees()[alph->generator_tree(j)]));

  SolveReport<double> rep;
  rep.indices = subgrid;
  rep.states.push_back(xi);
  detail::check_solver_box(xi, f.box, "solve_geodesic");
  for (std::size_t k = 0; k + 1 < subgrid.size(); ++k) {
    auto inc = X.increment(subgrid[k], subgrid[k + 1]);
    auto geo = realize_gl(alph, rescale(inc), lie_tol);
    auto leg = ode_solve(letter_fields, rep.states.back(), geo.path, f.box, reltol);
    rep.states.push_back(leg.states.back());
    detail::check_solver_box(rep.states.back(), f.box, "solve_geodesic");
  }
  return rep;
}

struct DefectFit {
  double slope = 0.0;
  double residual = 0.0;   // rms of the regression residuals
  bool exact = false;      // every defect vanished; slope undefined
  std::size_t points = 0;
  std::vector<std::pair<double, double>> samples;  // (omega, |defect|)
};

// Dyadic-level scan of the one-step defects of a solved trajectory: for each
// level the report's step range splits into 2^l blocks, the defect
// y_{s,t} - (one Euler step over [s,t]) is measured against omega(s,t), and
// the log-log cloud is fit by least squares.
template <class S>
DefectFit defect_scan(const BranchedRoughPath<S>& X, const PolyVectorField<S>& f,
                      const SolveReport<S>& rep, int min_levels = 4) {
  const std::size_t n = rep.indices.size() - 1;
  auto tab = detail::euler_tables(f, *X.basis());
  ControlOmega<S> omega(X, X.p());

  DefectFit fit;
  int levels = 0;
  for (std::size_t blocks = 2;; blocks *= 2) {
    if (n % blocks != 0) break;
    std::size_t bs = n / blocks;
    if (bs == 0) break;
    ++levels;
    for (std::size_t b = 0; b < blocks; ++b) {
      std::size_t ks = b * bs, kt = (b + 1) * bs;
      auto inc = X.increment(rep.indices[ks], rep.indices[kt]);
      auto loc = detail::euler_step(tab, inc, rep.states[ks]);
      double gam = 0.0;
      for (std::size_t i = 0; i < loc.size(); ++i) {
        double di = to_double(rep.states[kt][i] - loc[i]);
        gam += di * di;
      }
      gam = std::sqrt(gam);
      fit.samples.push_back({omega(rep.indices[ks], rep.indices[kt]), gam});
    }
    if (bs == 1) break;
  }
  if (levels < min_levels)
    throw std::runtime_error("defect_scan: fewer than the required number of scale levels");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (auto& [om, gam] : fit.samples) {
    if (gam == 0.0 || om == 0.0) continue;
    double lx = std::log(om), ly = std::log(gam);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  fit.points = m;
  if (m == 0) {
    fit.exact = true;
    return fit;
  }
  if (m < 2) throw std::runtime_error("defect_scan: not enough nonzero defects to fit");
  double det = sxx - sx * sx / m;
  if (det == 0.0) throw std::runtime_error("defect_scan: degenerate regression");
  fit.slope = (sxy - sx * sy / m) / det;
  double icept = (sy - fit.slope * sx) / m;
  double rss = 0.0;
  for (auto& [om, gam] : fit.samples) {
    if (gam == 0.0 || om == 0.0) continue;
    double r = std::log(gam) - (icept + fit.slope * std::log(om));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

}  // namespace brp
