#include "harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "brp/json_io.hpp"
#include "brp/ode.hpp"
#include "brp/rng.hpp"
#include "brp/solve.hpp"
#include "brp/version.hpp"
#include "harness/fit.hpp"
#include "harness/instances.hpp"

namespace brp::harness {

// ------------------------------------------------------------------ shared

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int nt = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr err;
  std::mutex mu;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += nt) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

namespace {

// p-th power of the p-variation over every grid pair, one relaxation pass per
// left endpoint; increment norms are pulled into a dense array first so the
// inner loops never touch the path's mutex
std::vector<std::vector<double>> pvar_pow_table(const BranchedRoughPath<double>& x, double p) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w[i][j] = std::pow(x.increment_norm(i, j), p);
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double best = 0.0;
      for (std::size_t k = i; k < j; ++k) best = std::max(best, v[i][k] + w[k][j]);
      v[i][j] = best;
    }
  return v;
}

}  // namespace

std::vector<std::vector<double>> omega_table(const BranchedRoughPath<double>& a,
                                             const BranchedRoughPath<double>* b, double p) {
  auto om = pvar_pow_table(a, p);
  if (b) {
    if (b->grid() != a.grid()) throw std::invalid_argument("omega_table: grids must match");
    auto vb = pvar_pow_table(*b, p);
    for (std::size_t i = 0; i < om.size(); ++i)
      for (std::size_t j = 0; j < om.size(); ++j) om[i][j] += vb[i][j];
  }
  return om;
}

double rho_from_table(const BranchedRoughPath<double>& x1, const BranchedRoughPath<double>& x2,
                      const std::vector<std::vector<double>>& om) {
  if (x1.basis() != x2.basis() || x1.grid() != x2.grid() || x1.p() != x2.p())
    throw std::invalid_argument("rho_from_table: paths must share basis, grid and p");
  const auto& basis = *x1.basis();
  const double p = x1.p();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < x1.size(); ++i)
    for (std::size_t j = i + 1; j < x1.size(); ++j) {
      auto a = x1.increment(i, j);
      auto b = x2.increment(i, j);
      for (std::size_t fi = 1; fi < basis.forests().size(); ++fi) {
        double num = std::abs(a.forest_value(static_cast<int>(fi)) -
                              b.forest_value(static_cast<int>(fi)));
        if (num == 0.0) continue;
        if (om[i][j] == 0.0) return std::numeric_limits<double>::infinity();
        int deg = basis.forest_degree(static_cast<int>(fi));
        worst = std::max(worst, num / std::pow(om[i][j], deg / p));
      }
    }
  return worst;
}

Json report_envelope(const Json& config, int hopf_n, int hopf_d) {
  Json out;
  out["version"] = kVersion;
  out["config"] = config;
  out["config_hash"] = json_hash(config);
  out["alphabet_hash"] = json_hash(alphabet_to_json(*Alphabet::get(hopf_n, hopf_d)));
  return out;
}

namespace {

PolyVectorField<double> field_add(PolyVectorField<double> a, const PolyVectorField<double>& b) {
  if (a.e != b.e || a.d != b.d) throw std::invalid_argument("field_add: dimension mismatch");
  for (int j = 0; j < a.d; ++j)
    for (int i = 0; i < a.e; ++i) a.comp[j][i] += b.comp[j][i];
  return a;
}

template <class S>
PolyVectorField<S> field_scale(PolyVectorField<S> a, const S& c) {
  for (auto& m : a.comp)
    for (auto& poly : m) poly *= c;
  return a;
}

// sup over grid pairs of |increment difference| / omega^{1/p}, 0/0 = 0
double lhs_sup(const std::vector<std::vector<double>>& y1,
               const std::vector<std::vector<double>>& y2,
               const std::vector<std::vector<double>>& om, double p) {
  if (y1.size() != y2.size() || y1.size() != om.size())
    throw std::invalid_argument("lhs_sup: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < y1.size(); ++i)
    for (std::size_t j = i + 1; j < y1.size(); ++j) {
      double num2 = 0.0;
      for (std::size_t c = 0; c < y1[i].size(); ++c) {
        double dd = (y1[j][c] - y1[i][c]) - (y2[j][c] - y2[i][c]);
        num2 += dd * dd;
      }
      if (num2 == 0.0) continue;
      if (om[i][j] == 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::sqrt(num2) / std::pow(om[i][j], 1.0 / p));
    }
  return worst;
}

Tree chain_tree(int height) {
  Tree t = leaf(1);
  for (int k = 1; k < height; ++k) t = Tree(1, {t});
  return t;
}

void finish_sweep(SweepResult& s, double tol) {
  std::vector<double> lx, ly, logm;
  for (const auto& pt : s.points) {
    if (pt.lhs > 0.0 && std::isfinite(pt.lhs)) {
      lx.push_back(std::log(pt.h));
      ly.push_back(std::log(pt.lhs));
      if (pt.ingredient > 0.0) logm.push_back(std::log(pt.lhs / pt.ingredient));
    }
  }
  if (lx.size() >= 2) {
    auto fit = fit_line(lx, ly);
    s.slope = fit.slope;
    s.intercept = fit.intercept;
    s.rms = fit.rms;
    s.pass = std::abs(fit.slope - 1.0) <= tol;
  }
  if (!logm.empty()) {
    double acc = 0.0;
    for (double v : logm) acc += v;
    s.m_hat = std::exp(acc / logm.size());
  }
}

struct LipBase {
  std::optional<PiecewiseLinearPath<double>> x;
  std::optional<BranchedRoughPath<double>> X;
  std::vector<double> psi;  // top-tree sweep shape on the grid
  SolveReport<double> y1;
  std::vector<std::vector<double>> om;  // two-path control of the unperturbed pair
};

LipBase lip_base(const LipschitzConfig& cfg, const PolyVectorField<double>& f,
                 const std::vector<double>& xi, const Tree& top, int blocks) {
  LipBase base;
  const int n = cfg.segments * blocks;
  CounterRng rng(cfg.seed, 0);
  std::vector<double> times(n + 1);
  std::vector<std::vector<double>> pts(n + 1, std::vector<double>(cfg.d, 0.0));
  for (int k = 0; k <= n; ++k) times[k] = static_cast<double>(k) / cfg.segments;
  for (int k = 1; k <= n; ++k)
    for (int j = 0; j < cfg.d; ++j)
      pts[k][j] = pts[k - 1][j] + rng.uniform(-cfg.path_amp, cfg.path_amp);
  base.x.emplace(times, pts);

  // fixed non-geometric deformation of the top coefficient; one period per block
  std::vector<double> phi0(n + 1), psi(n + 1);
  constexpr double two_pi = 6.283185307179586;
  for (int k = 0; k <= n; ++k) {
    phi0[k] = 0.03 * (1.0 - std::cos(two_pi * times[k]));
    psi[k] = std::sin(two_pi * times[k]);
  }
  base.psi = std::move(psi);
  auto plain = lift_bv(*base.x, cfg.p);
  base.X.emplace(perturb_top(plain, top, phi0));
  base.y1 = solve_euler(*base.X, f, xi);
  base.om = omega_table(*base.X, &*base.X, cfg.p);
  return base;
}

}  // namespace

LipschitzReport lipschitz_experiment(const LipschitzConfig& cfg) {
  if (!(cfg.gamma > cfg.p) || cfg.p < 1.0)
    throw std::invalid_argument("lipschitz: need gamma > p >= 1");
  const int N = static_cast<int>(cfg.p);
  if (N < 1 || N > 3) throw std::invalid_argument("lipschitz: truncation level must be 1..3");
  const Tree top = chain_tree(N);

  CounterRng rng_field(cfg.seed, 1), rng_xi(cfg.seed, 2), rng_u(cfg.seed, 3), rng_g(cfg.seed, 4);
  auto f = random_field(rng_field, cfg.e, cfg.d, cfg.degree, 0.4, cfg.box_radius, cfg.field_cap);
  std::vector<double> xi(cfg.e);
  for (auto& v : xi) v = rng_xi.uniform(-0.2, 0.2);
  std::vector<double> u(cfg.e);
  double un = 0.0;
  for (auto& v : u) {
    v = rng_u.uniform(-1.0, 1.0);
    un += v * v;
  }
  for (auto& v : u) v /= std::sqrt(un);
  auto g = random_field(rng_g, cfg.e, cfg.d, cfg.degree, 0.2, cfg.box_radius, 0.1);
  const double lip_g = lip_gamma_norm(g, cfg.gamma - 1.0).value;

  LipschitzReport rep;
  auto base = lip_base(cfg, f, xi, top, 1);

  {  // (a) initial value
    SweepResult s;
    s.name = "initial-value";
    for (double h : cfg.hs) {
      std::vector<double> xi2 = xi;
      for (int c = 0; c < cfg.e; ++c) xi2[c] += h * u[c];
      auto y2 = solve_euler(*base.X, f, xi2);
      s.points.push_back({h, lhs_sup(base.y1.states, y2.states, base.om, cfg.p), h});
    }
    finish_sweep(s, cfg.slope_tol);
    rep.sweeps.push_back(std::move(s));
  }
  {  // (b) vector field
    SweepResult s;
    s.name = "vector-field";
    for (double h : cfg.hs) {
      auto f2 = field_add(f, field_scale(g, h));
      auto y2 = solve_euler(*base.X, f2, xi);
      s.points.push_back({h, lhs_sup(base.y1.states, y2.states, base.om, cfg.p), h * lip_g});
    }
    finish_sweep(s, cfg.slope_tol);
    rep.sweeps.push_back(std::move(s));
  }
  {  // (c) top-tree perturbation; rho is the matching ingredient
    SweepResult s;
    s.name = "top-tree";
    for (double h0 : cfg.hs) {
      const double h = h0 * cfg.top_h_scale;
      std::vector<double> phi(base.psi.size());
      for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = h * base.psi[k];
      auto X2o = perturb_top(*base.X, top, phi);
      auto om = omega_table(*base.X, &X2o, cfg.p);
      auto y2 = solve_euler(X2o, f, xi);
      s.points.push_back({h, lhs_sup(base.y1.states, y2.states, om, cfg.p),
                          rho_from_table(*base.X, X2o, om)});
    }
    finish_sweep(s, cfg.slope_tol);
    rep.sweeps.push_back(std::move(s));
  }

  {  // h = 0 must reproduce the base trajectory bit for bit
    auto y2 = solve_euler(*base.X, f, xi);
    rep.zero_h_identical = (y2.states == base.y1.states);
    rep.zero_h_lhs = lhs_sup(base.y1.states, y2.states, base.om, cfg.p);
  }

  {  // normalization invariance, float: lambda = 2 stays in the dyadic lattice
    auto xd = dilate(*base.X, 2.0);
    auto fd = field_scale(f, 0.5);
    auto y2 = solve_euler(xd, fd, xi);
    double drift = 0.0;
    for (std::size_t r = 0; r < y2.states.size(); ++r)
      for (std::size_t c = 0; c < y2.states[r].size(); ++c)
        drift = std::max(drift, std::abs(y2.states[r][c] - base.y1.states[r][c]));
    rep.lambda_drift = drift;
  }

  {  // normalization invariance, exact rationals
    CounterRng rng(cfg.seed, 5);
    auto xq = random_rational_path(rng, cfg.d, 8);
    auto fq = random_rational_field(rng, cfg.e, cfg.d, 2, 0.0);
    std::vector<Rational> xiq = {Rational(1, 10), Rational(-1, 5)};
    xiq.resize(cfg.e, Rational(0));
    auto Xq = lift_bv(xq, cfg.p);
    auto ya = solve_euler(Xq, fq, xiq);
    auto yb = solve_euler(dilate(Xq, Rational(2)), field_scale(fq, Rational(1, 2)), xiq);
    rep.lambda_exact = (ya.states == yb.states);
  }

  {  // T-doubling: rerun sweep (a) on 1, 2, 4 concatenated blocks
    for (int blocks : cfg.t_blocks) {
      auto bt = (blocks == 1) ? std::move(base) : lip_base(cfg, f, xi, top, blocks);
      SweepResult s;
      for (double h : cfg.hs) {
        std::vector<double> xi2 = xi;
        for (int c = 0; c < cfg.e; ++c) xi2[c] += h * u[c];
        auto y2 = solve_euler(*bt.X, f, xi2);
        s.points.push_back({h, lhs_sup(bt.y1.states, y2.states, bt.om, cfg.p), h});
      }
      finish_sweep(s, cfg.slope_tol);
      rep.tscale.push_back({blocks, bt.om.front().back(), s.m_hat});
    }
    std::vector<double> omv, lm;
    for (const auto& pt : rep.tscale)
      if (pt.m_hat > 0) {
        omv.push_back(pt.omega);
        lm.push_back(std::log(pt.m_hat));
      }
    if (omv.size() >= 2) {
      auto fit = fit_line(omv, lm);
      rep.tscale_slope = fit.slope;
      rep.tscale_residual = fit.rms;
      rep.tscale_pass = fit.rms <= cfg.tscale_residual_tol;
    }
  }

  rep.pass = rep.zero_h_identical && rep.zero_h_lhs == 0.0 && rep.lambda_exact &&
             rep.lambda_drift == 0.0 && rep.tscale_pass;
  for (const auto& s : rep.sweeps) rep.pass = rep.pass && s.pass;
  return rep;
}

Json lipschitz_config_json(const LipschitzConfig& c) {
  return Json{{"p", c.p},
              {"gamma", c.gamma},
              {"d", c.d},
              {"e", c.e},
              {"segments", c.segments},
              {"degree", c.degree},
              {"path_amp", c.path_amp},
              {"field_cap", c.field_cap},
              {"box_radius", c.box_radius},
              {"hs", c.hs},
              {"top_h_scale", c.top_h_scale},
              {"t_blocks", c.t_blocks},
              {"slope_tol", c.slope_tol},
              {"tscale_residual_tol", c.tscale_residual_tol},
              {"seed", c.seed},
              {"threads", c.threads}};
}

LipschitzConfig lipschitz_config_from_json(const Json& j) {
  LipschitzConfig c;
  c.p = j.value("p", c.p);
  c.gamma = j.value("gamma", c.gamma);
  c.d = j.value("d", c.d);
  c.e = j.value("e", c.e);
  c.segments = j.value("segments", c.segments);
  c.degree = j.value("degree", c.degree);
  c.path_amp = j.value("path_amp", c.path_amp);
  c.field_cap = j.value("field_cap", c.field_cap);
  c.box_radius = j.value("box_radius", c.box_radius);
  c.hs = j.value("hs", c.hs);
  c.top_h_scale = j.value("top_h_scale", c.top_h_scale);
  c.t_blocks = j.value("t_blocks", c.t_blocks);
  c.slope_tol = j.value("slope_tol", c.slope_tol);
  c.tscale_residual_tol = j.value("tscale_residual_tol", c.tscale_residual_tol);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  return c;
}

Json lipschitz_report_json(const LipschitzConfig& cfg, const LipschitzReport& rep) {
  Json out = report_envelope(lipschitz_config_json(cfg), static_cast<int>(cfg.p), cfg.d);
  Json sweeps = Json::array();
  for (const auto& s : rep.sweeps) {
    Json pts = Json::array();
    for (const auto& pt : s.points)
      pts.push_back({{"h", pt.h}, {"lhs", pt.lhs}, {"ingredient", pt.ingredient}});
    sweeps.push_back({{"name", s.name},
                      {"points", pts},
                      {"slope", s.slope},
                      {"intercept", s.intercept},
                      {"rms", s.rms},
                      {"m_hat", s.m_hat},
                      {"pass", s.pass}});
  }
  out["sweeps"] = sweeps;
  out["zero_h"] = {{"lhs", rep.zero_h_lhs}, {"identical", rep.zero_h_identical}};
  out["lambda_check"] = {{"exact_identical", rep.lambda_exact},
                         {"float_drift", rep.lambda_drift}};
  Json ts = Json::array();
  for (const auto& pt : rep.tscale)
    ts.push_back({{"blocks", pt.blocks}, {"omega", pt.omega}, {"m_hat", pt.m_hat}});
  out["t_scaling"] = {{"points", ts},
                      {"slope", rep.tscale_slope},
                      {"residual", rep.tscale_residual},
                      {"pass", rep.tscale_pass}};
  out["pass"] = rep.pass;
  return out;
}

std::string lipschitz_sweeps_csv(const LipschitzReport& rep) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "sweep,h,lhs,ingredient\n";
  for (const auto& s : rep.sweeps)
    for (const auto& pt : s.points)
      os << s.name << ',' << pt.h << ',' << pt.lhs << ',' << pt.ingredient << '\n';
  return os.str();
}

std::string lipschitz_tscale_csv(const LipschitzReport& rep) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "blocks,omega,m_hat\n";
  for (const auto& pt : rep.tscale)
    os << pt.blocks << ',' << pt.omega << ',' << pt.m_hat << '\n';
  return os.str();
}

// --------------------------------------------------------------- ode bounds

namespace {

OdeInstanceRow ode_instance(const OdeBoundsConfig& cfg, int index) {
  OdeInstanceRow row;
  row.index = index;
  CounterRng rng(cfg.seed, static_cast<std::uint64_t>(index));
  row.e = rng.uniform_int(1, cfg.max_e);
  row.k = rng.uniform_int(1, cfg.max_k);
  const int deg = rng.uniform_int(1, cfg.degree);
  try {
    auto f = random_field(rng, row.e, row.k, deg, 0.3, cfg.box_radius, 0.12);
    auto bump = random_field(rng, row.e, row.k, std::min(deg, 2), 0.02, cfg.box_radius, 0.05);
    auto ft = field_add(f, bump);

    const int m = rng.uniform_int(3, 6);
    std::vector<std::vector<double>> del(m, std::vector<double>(row.k));
    std::vector<std::vector<double>> delt(m, std::vector<double>(row.k));
    for (int s = 0; s < m; ++s)
      for (int j = 0; j < row.k; ++j) {
        del[s][j] = rng.uniform(-0.3, 0.3);
        delt[s][j] = del[s][j] + rng.uniform(-0.05, 0.05);
      }
    if (index == cfg.adversarial_index) {
      // push one driver component to 1-variation about 5 in both drivers
      double var = 0.0;
      for (int s = 0; s < m; ++s) var += std::abs(del[s][0]);
      double factor = 5.0 / std::max(var, 1e-9);
      for (int s = 0; s < m; ++s) {
        del[s][0] *= factor;
        delt[s][0] = del[s][0];
      }
    }
    auto build = [&](const std::vector<std::vector<double>>& inc) {
      std::vector<double> times(m + 1);
      std::vector<std::vector<double>> pts(m + 1, std::vector<double>(row.k, 0.0));
      for (int s = 0; s <= m; ++s) times[s] = static_cast<double>(s) / m;
      for (int s = 1; s <= m; ++s)
        for (int j = 0; j < row.k; ++j) pts[s][j] = pts[s - 1][j] + inc[s - 1][j];
      return PiecewiseLinearPath<double>(times, pts);
    };
    auto x = build(del);
    auto xt = build(delt);
    for (int j = 0; j < row.k; ++j)
      row.max_one_variation = std::max(
          row.max_one_variation, std::max(x.one_variation(j), xt.one_variation(j)));

    std::vector<double> y0(row.e), y0t(row.e);
    for (int i = 0; i < row.e; ++i) {
      y0[i] = rng.uniform(-0.3, 0.3);
      y0t[i] = y0[i] + rng.uniform(-0.05, 0.05);
    }
    auto est = check_ode_estimates(f, ft, x, xt, y0, y0t);
    row.lhs1 = est.lhs1;
    row.rhs1 = est.rhs1;
    row.lhs2 = est.lhs2;
    row.rhs2 = est.rhs2;
    row.pass = (est.lhs1 <= est.rhs1 + cfg.slack) && (est.lhs2 <= est.rhs2 + cfg.slack);
  } catch (const std::exception& ex) {
    row.error = ex.what();
    row.pass = false;
  }
  return row;
}

}  // namespace

OdeBoundsReport ode_bounds_experiment(const OdeBoundsConfig& cfg) {
  if (cfg.instances < 1) throw std::invalid_argument("ode bounds: need at least one instance");
  OdeBoundsReport rep;
  rep.rows.resize(cfg.instances);
  parallel_for(cfg.instances, cfg.threads,
               [&](int i) { rep.rows[i] = ode_instance(cfg, i); });
  for (const auto& row : rep.rows) {
    if (row.pass) ++rep.passes;
    rep.max_one_variation = std::max(rep.max_one_variation, row.max_one_variation);
  }
  rep.pass = rep.passes == cfg.instances;
  return rep;
}

Json ode_bounds_config_json(const OdeBoundsConfig& c) {
  return Json{{"instances", c.instances}, {"max_e", c.max_e},
              {"max_k", c.max_k},         {"degree", c.degree},
              {"box_radius", c.box_radius}, {"slack", c.slack},
              {"adversarial_index", c.adversarial_index}, {"seed", c.seed},
              {"threads", c.threads}};
}

OdeBoundsConfig ode_bounds_config_from_json(const Json& j) {
  OdeBoundsConfig c;
  c.instances = j.value("instances", c.instances);
  c.max_e = j.value("max_e", c.max_e);
  c.max_k = j.value("max_k", c.max_k);
  c.degree = j.value("degree", c.degree);
  c.box_radius = j.value("box_radius", c.box_radius);
  c.slack = j.value("slack", c.slack);
  c.adversarial_index = j.value("adversarial_index", c.adversarial_index);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  return c;
}

Json ode_bounds_report_json(const OdeBoundsConfig& cfg, const OdeBoundsReport& rep) {
  Json out = report_envelope(ode_bounds_config_json(cfg), 1, cfg.max_k);
  Json rows = Json::array();
  for (const auto& r : rep.rows) {
    Json jr{{"index", r.index},
            {"e", r.e},
            {"k", r.k},
            {"lhs1", r.lhs1},
            {"rhs1", r.rhs1},
            {"lhs2", r.lhs2},
            {"rhs2", r.rhs2},
            {"max_one_variation", r.max_one_variation},
            {"pass", r.pass}};
    if (!r.error.empty()) jr["error"] = r.error;
    rows.push_back(jr);
  }
  out["rows"] = rows;
  out["instances"] = static_cast<int>(rep.rows.size());
  out["passes"] = rep.passes;
  out["max_one_variation"] = rep.max_one_variation;
  out["pass"] = rep.pass;
  return out;
}

std::string ode_bounds_csv(const OdeBoundsReport& rep) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "index,e,k,lhs1,rhs1,lhs2,rhs2,max_one_variation,pass\n";
  for (const auto& r : rep.rows)
    os << r.index << ',' << r.e << ',' << r.k << ',' << r.lhs1 << ',' << r.rhs1 << ','
       << r.lhs2 << ',' << r.rhs2 << ',' << r.max_one_variation << ',' << (r.pass ? 1 : 0)
       << '\n';
  return os.str();
}

// -------------------------------------------------------------- convergence

namespace {

PiecewiseLinearPath<double> curved_driver(int n, double amp) {
  std::vector<double> times(n + 1);
  std::vector<std::vector<double>> pts(n + 1, std::vector<double>(2));
  for (int k = 0; k <= n; ++k) {
    double t = static_cast<double>(k) / n;
    times[k] = t;
    pts[k][0] = amp * std::sin(2.0 * t);
    pts[k][1] = amp * (std::cos(3.0 * t) - 1.0) / 3.0;
  }
  return PiecewiseLinearPath<double>(times, pts);
}

PolyVectorField<double> convergence_field() {
  PolyVectorField<double> f;
  f.e = 2;
  f.d = 2;
  f.box = {{-4.0, 4.0}, {-4.0, 4.0}};
  f.comp.assign(2, PolyMap<double>(2, Polynomial<double>(2)));
  f.comp[0][0].add_term({0, 0}, 1.0);
  f.comp[0][0].add_term({0, 1}, 0.3);
  f.comp[0][0].add_term({2, 0}, 0.05);
  f.comp[0][1].add_term({1, 0}, 0.2);
  f.comp[1][0].add_term({0, 1}, 0.1);
  f.comp[1][1].add_term({0, 0}, 1.0);
  f.comp[1][1].add_term({1, 0}, -0.2);
  f.comp[1][1].add_term({0, 2}, 0.05);
  return f;
}

double backend_amp(double p) { return static_cast<int>(p) >= 2 ? 0.25 : 0.04; }

}  // namespace

ConvergenceReport convergence_experiment(const ConvergenceConfig& cfg) {
  ConvergenceReport rep;
  auto f = convergence_field();
  const std::vector<double> xi = {0.1, -0.2};

  for (double p : cfg.ps) {
    DefectRow row;
    row.p = p;
    const int N = static_cast<int>(p);
    row.threshold = static_cast<double>(N + 1) / p - cfg.slope_slack;
    auto x = curved_driver(cfg.defect_segments, 0.3);
    auto X = lift_bv(x, p);
    auto sol = solve_euler(X, f, xi);
    auto fit = defect_scan(X, f, sol);
    row.slope = fit.slope;
    row.residual = fit.residual;
    row.points = fit.points;
    row.exact = fit.exact;
    row.samples = fit.samples;
    row.pass = fit.exact || fit.slope >= row.threshold;
    rep.defects.push_back(std::move(row));
  }

  for (double p : cfg.ps) {
    BackendRow row;
    row.p = p;
    const int N = static_cast<int>(p);
    row.order_threshold = static_cast<double>(N + 1) / p - 1.0 - cfg.order_slack;
    row.samples.resize(cfg.meshes.size());
    parallel_for(static_cast<int>(cfg.meshes.size()), cfg.threads, [&](int mi) {
      const int n = cfg.meshes[mi];
      auto x = curved_driver(n, backend_amp(p));
      auto X = lift_bv(x, p);
      auto ye = solve_euler(X, f, xi);
      auto yg = solve_geodesic(X, f, xi);
      double disc = 0.0;
      for (std::size_t r = 0; r < ye.states.size(); ++r)
        for (std::size_t c = 0; c < ye.states[r].size(); ++c)
          disc = std::max(disc, std::abs(ye.states[r][c] - yg.states[r][c]));
      row.samples[mi] = {n, disc};
    });
    std::vector<double> lx, ly;
    for (const auto& [n, disc] : row.samples)
      if (disc > 0) {
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(disc));
      }
    if (lx.size() >= 2) row.order = -fit_line(lx, ly).slope;
    row.finest = row.samples.back().second;
    row.pass = row.order >= row.order_threshold && row.finest <= cfg.agree_tol;
    rep.backends.push_back(std::move(row));
  }

  rep.pass = true;
  for (const auto& r : rep.defects) rep.pass = rep.pass && r.pass;
  for (const auto& r : rep.backends) rep.pass = rep.pass && r.pass;
  return rep;
}

Json convergence_config_json(const ConvergenceConfig& c) {
  return Json{{"ps", c.ps},
              {"defect_segments", c.defect_segments},
              {"meshes", c.meshes},
              {"slope_slack", c.slope_slack},
              {"order_slack", c.order_slack},
              {"agree_tol", c.agree_tol},
              {"seed", c.seed},
              {"threads", c.threads}};
}

ConvergenceConfig convergence_config_from_json(const Json& j) {
  ConvergenceConfig c;
  c.ps = j.value("ps", c.ps);
  c.defect_segments = j.value("defect_segments", c.defect_segments);
  c.meshes = j.value("meshes", c.meshes);
  c.slope_slack = j.value("slope_slack", c.slope_slack);
  c.order_slack = j.value("order_slack", c.order_slack);
  c.agree_tol = j.value("agree_tol", c.agree_tol);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  return c;
}

Json convergence_report_json(const ConvergenceConfig& cfg, const ConvergenceReport& rep) {
  int nmax = 1;
  for (double p : cfg.ps) nmax = std::max(nmax, static_cast<int>(p));
  Json out = report_envelope(convergence_config_json(cfg), nmax, 2);
  Json defects = Json::array();
  for (const auto& r : rep.defects)
    defects.push_back({{"p", r.p},
                       {"slope", r.slope},
                       {"residual", r.residual},
                       {"points", r.points},
                       {"exact", r.exact},
                       {"threshold", r.threshold},
                       {"pass", r.pass}});
  out["defects"] = defects;
  Json backends = Json::array();
  for (const auto& r : rep.backends) {
    Json samples = Json::array();
    for (const auto& [n, disc] : r.samples)
      samples.push_back({{"mesh", n}, {"discrepancy", disc}});
    backends.push_back({{"p", r.p},
                        {"samples", samples},
                        {"order", r.order},
                        {"finest", r.finest},
                        {"order_threshold", r.order_threshold},
                        {"pass", r.pass}});
  }
  out["backends"] = backends;
  out["pass"] = rep.pass;
  return out;
}

std::string convergence_defect_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "p,omega,defect\n";
  for (const auto& r : rep.defects)
    for (const auto& [om, gam] : r.samples) os << r.p << ',' << om << ',' << gam << '\n';
  return os.str();
}

std::string convergence_backend_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "p,mesh,discrepancy\n";
  for (const auto& r : rep.backends)
    for (const auto& [n, disc] : r.samples) os << r.p << ',' << n << ',' << disc << '\n';
  return os.str();
}

}  // namespace brp::harness
