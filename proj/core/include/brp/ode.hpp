#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "brp/pl_path.hpp"
#include "brp/vector_field.hpp"

namespace brp {

struct OdeSolution {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

namespace detail {

inline void check_in_box(const std::vector<double>& y,
                         const std::vector<std::pair<double, double>>& box) {
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!std::isfinite(y[j]))
      throw std::runtime_error("ode_solve: trajectory diverged (non-finite state)");
    if (box.empty()) continue;
    auto [lo, hi] = box[j];
    double margin = 1e-9 * (1.0 + std::abs(lo) + std::abs(hi));
    if (y[j] < lo - margin || y[j] > hi + margin)
      throw std::runtime_error("ode_solve: trajectory left the domain box");
  }
}

// n RK4 steps of the autonomous field g on [0,1], recording `records`+1
// equally spaced states (n must be a multiple of records)
inline std::vector<std::vector<double>> rk4_segment(const PolyMap<double>& g,
                                                    const std::vector<double>& y0, int n,
                                                    int records) {
  const double h = 1.0 / n;
  const int stride = n / records;
  std::vector<std::vector<double>> rec = {y0};
  std::vector<double> y = y0;
  auto ev = [&](const std::vector<double>& z) { return eval_map(g, z); };
  std::vector<double> tmp(y.size());
  for (int s = 1; s <= n; ++s) {
    auto k1 = ev(y);
    for (std::size_t j = 0; j < y.size(); ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    auto k2 = ev(tmp);
    for (std::size_t j = 0; j < y.size(); ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    auto k3 = ev(tmp);
    for (std::size_t j = 0; j < y.size(); ++j) tmp[j] = y[j] + h * k3[j];
    auto k4 = ev(tmp);
    for (std::size_t j = 0; j < y.size(); ++j)
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    if (s % stride == 0) rec.push_back(y);
  }
  return rec;
}

}  // namespace detail

// dy = sum_j fields[j](y) dx^j. Each piecewise-linear segment makes the
// driver linear in time, so the segment reduces to an autonomous ODE in
// scaled time; that is integrated by RK4 with step doubling until two
// successive refinements agree within reltol (relative to the state size).
inline OdeSolution ode_solve(const std::vector<PolyMap<double>>& fields,
                             const std::vector<double>& xi,
                             const PiecewiseLinearPath<double>& x,
                             const std::vector<std::pair<double, double>>& box,
                             double reltol = 1e-10, int out_substeps = 1) {
  const int e = static_cast<int>(xi.size());
  if (fields.empty() || static_cast<int>(fields.size()) != x.dim())
    throw std::invalid_argument("ode_solve: field count must match driver dimension");
  for (const auto& g : fields) {
    if (static_cast<int>(g.size()) != e)
      throw std::invalid_argument("ode_solve: field coordinate count mismatch");
    for (const auto& p : g)
      if (p.vars() != e) throw std::invalid_argument("ode_solve: field arity mismatch");
  }
  if (!box.empty() && static_cast<int>(box.size()) != e)
    throw std::invalid_argument("ode_solve: box arity mismatch");
  if (out_substeps < 1) throw std::invalid_argument("ode_solve: out_substeps must be positive");

  OdeSolution sol;
  sol.times = {x.times().front()};
  sol.states = {xi};
  detail::check_in_box(xi, box);

  std::vector<double> y = xi;
  for (std::size_t seg = 0; seg < x.segment_count(); ++seg) {
    auto delta = x.segment_increment(seg);
    PolyMap<double> g;
    g.reserve(e);
    for (int i = 0; i < e; ++i) {
      Polynomial<double> acc(e);
      for (std::size_t j = 0; j < fields.size(); ++j) {
        if (delta[j] == 0.0 || fields[j][i].is_zero()) continue;
        auto term = fields[j][i];
        term *= delta[j];
        acc += term;
      }
      g.push_back(std::move(acc));
    }

    int n = out_substeps;
    while (n < 4 * out_substeps) n *= 2;
    auto rec = detail::rk4_segment(g, y, n, out_substeps);
    for (;;) {
      if (n > (1 << 22)) throw std::runtime_error("ode_solve: step budget exhausted");
      auto fine = detail::rk4_segment(g, y, 2 * n, out_substeps);
      double diff = 0.0, scale = 1.0;
      for (std::size_t r = 0; r < rec.size(); ++r)
        for (std::size_t j = 0; j < rec[r].size(); ++j) {
          if (std::isfinite(fine[r][j]))
            diff = std::max(diff, std::abs(fine[r][j] - rec[r][j]));
          else
            diff = std::numeric_limits<double>::infinity();
          scale = std::max(scale, std::abs(fine[r][j]));
        }
      n *= 2;
      rec = std::move(fine);
      if (diff <= reltol * scale) break;
    }

    const double t0 = x.times()[seg], t1 = x.times()[seg + 1];
    for (int r = 1; r <= out_substeps; ++r) {
      detail::check_in_box(rec[r], box);
      sol.times.push_back(t0 + (t1 - t0) * r / out_substeps);
      sol.states.push_back(rec[r]);
    }
    y = rec.back();
  }
  return sol;
}

inline OdeSolution ode_solve(const PolyVectorField<double>& f, const std::vector<double>& xi,
                             const PiecewiseLinearPath<double>& x, double reltol = 1e-10,
                             int out_substeps = 1) {
  f.validate();
  return ode_solve(f.comp, xi, x, f.box, reltol, out_substeps);
}

struct OdeEstimateReport {
  double lhs1 = 0.0, rhs1 = 0.0;
  double lhs2 = 0.0, rhs2 = 0.0;
  bool pass = false;
  std::vector<double> M;  // per driver component, max of the two Lip(1) norms
  std::vector<double> l;  // per driver component, max of the two 1-variations
  double exp_factor = 1.0;
};

namespace detail {

inline PiecewiseLinearPath<double> resample(const PiecewiseLinearPath<double>& x,
                                            const std::vector<double>& times) {
  std::vector<std::vector<double>> pts;
  pts.reserve(times.size());
  for (double t : times) pts.push_back(x.value_at(t));
  return PiecewiseLinearPath<double>(times, pts);
}

}  // namespace detail

// Both sides of the two Lipschitz estimates for ODE solutions: the sup
// distance between increments (resp. values) of the two trajectories against
// the explicit constant built from Lip(1) norms of the component fields,
// 1-variations of the drivers, and the sup distance between the fields.
inline OdeEstimateReport check_ode_estimates(const PolyVectorField<double>& f,
                                             const PolyVectorField<double>& ft,
                                             const PiecewiseLinearPath<double>& x,
                                             const PiecewiseLinearPath<double>& xt,
                                             const std::vector<double>& y0,
                                             const std::vector<double>& y0t,
                                             int resolution = 8) {
  f.validate();
  ft.validate();
  if (f.e != ft.e || f.d != ft.d)
    throw std::invalid_argument("check_ode_estimates: field dimensions differ");
  if (f.box != ft.box)
    throw std::invalid_argument("check_ode_estimates: fields must share a box");
  if (x.dim() != f.d || xt.dim() != f.d)
    throw std::invalid_argument("check_ode_estimates: driver dimension mismatch");
  if (static_cast<int>(y0.size()) != f.e || static_cast<int>(y0t.size()) != f.e)
    throw std::invalid_argument("check_ode_estimates: start point dimension mismatch");
  if (std::abs(x.times().front() - xt.times().front()) > 1e-12 ||
      std::abs(x.times().back() - xt.times().back()) > 1e-12)
    throw std::invalid_argument("check_ode_estimates: drivers must share the time span");

  std::vector<double> grid = x.times();
  grid.insert(grid.end(), xt.times().begin(), xt.times().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto xm = detail::resample(x, grid);
  auto xtm = detail::resample(xt, grid);
  const int sub = 8;
  auto sol = ode_solve(f, y0, xm, 1e-10, sub);
  auto solt = ode_solve(ft, y0t, xtm, 1e-10, sub);

  OdeEstimateReport rep;
  for (std::size_t r = 0; r < sol.states.size(); ++r) {
    double dv = 0.0, di = 0.0;
    for (int i = 0; i < f.e; ++i) {
      double a = sol.states[r][i] - solt.states[r][i];
      dv += a * a;
      double b = (sol.states[r][i] - y0[i]) - (solt.states[r][i] - y0t[i]);
      di += b * b;
    }
    rep.lhs2 = std::max(rep.lhs2, std::sqrt(dv));
    rep.lhs1 = std::max(rep.lhs1, std::sqrt(di));
  }

  double dy0 = 0.0;
  for (int i = 0; i < f.e; ++i) dy0 += (y0[i] - y0t[i]) * (y0[i] - y0t[i]);
  dy0 = std::sqrt(dy0);

  auto diff_field = f.difference(ft);
  double sum_Ml = 0.0, sum1 = 0.0, sum_Mdx = 0.0, sum_ldf = 0.0;
  for (int j = 1; j <= f.d; ++j) {
    double Mj = std::max(lip_gamma_norm(f.restriction(j), 1.0, resolution).value,
                         lip_gamma_norm(ft.restriction(j), 1.0, resolution).value);
    double lj = std::max(to_double(x.one_variation(j - 1)), to_double(xt.one_variation(j - 1)));
    double dxj = 0.0;
    for (std::size_t s = 0; s < xm.segment_count(); ++s)
      dxj += std::abs(xm.segment_increment(s)[j - 1] - xtm.segment_increment(s)[j - 1]);
    double dfj = sup_norm(diff_field.restriction(j), resolution);
    rep.M.push_back(Mj);
    rep.l.push_back(lj);
    sum_Ml += Mj * lj;
    sum1 += Mj * lj * dy0 + Mj * dxj + lj * dfj;
    sum_Mdx += Mj * dxj;
    sum_ldf += lj * dfj;
  }
  rep.exp_factor = std::exp(2.0 * sum_Ml);
  rep.rhs1 = sum1 * rep.exp_factor;
  rep.rhs2 = (dy0 + sum_Mdx + sum_ldf) * rep.exp_factor;
  rep.pass = rep.lhs1 <= rep.rhs1 * (1.0 + 1e-6) && rep.lhs2 <= rep.rhs2 * (1.0 + 1e-6);
  return rep;
}

}  // namespace brp
