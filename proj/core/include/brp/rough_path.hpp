#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>

#include "brp/ck_hopf.hpp"
#include "brp/pl_path.hpp"

namespace brp {

// Grid-sampled path in the truncated character group. states[i] = X_{0,t_i};
// increments X_{s,t} = X_s^{-1} X_t are multiplicative over grid triples by
// construction. Inverse states and increment norms are cached; the caches are
// internally locked so metric sweeps can run concurrently.
template <class S>
class BranchedRoughPath {
 public:
  BranchedRoughPath(double p, std::shared_ptr<const HopfBasis> basis, std::vector<double> grid,
                    std::vector<Character<S>> states)
      : p_(p), basis_(std::move(basis)), grid_(std::move(grid)), states_(std::move(states)) {
    if (!(p_ >= 1.0)) throw std::invalid_argument("rough path: p must be at least 1");
    if (static_cast<int>(std::floor(p_)) != basis_->N())
      throw std::invalid_argument("rough path: truncation level must equal [p]");
    if (grid_.size() < 2 || grid_.size() != states_.size())
      throw std::invalid_argument("rough path: grid and states must align");
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
      if (!(grid_[i] < grid_[i + 1]))
        throw std::invalid_argument("rough path: grid must be strictly increasing");
    for (const auto& st : states_)
      if (st.basis() != basis_) throw std::invalid_argument("rough path: state basis mismatch");
    inv_.resize(states_.size());
  }

  BranchedRoughPath(const BranchedRoughPath& o)
      : p_(o.p_), basis_(o.basis_), grid_(o.grid_), states_(o.states_) {
    inv_.resize(states_.size());
  }
  BranchedRoughPath& operator=(const BranchedRoughPath&) = delete;

  double p() const { return p_; }
  int N() const { return basis_->N(); }
  int d() const { return basis_->d(); }
  const std::shared_ptr<const HopfBasis>& basis() const { return basis_; }
  const std::vector<double>& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  const Character<S>& state(std::size_t i) const { return states_.at(i); }
  const std::vector<Character<S>>& states() const { return states_; }

  Character<S> increment(std::size_t i, std::size_t j) const {
    if (i > j || j >= states_.size()) throw std::invalid_argument("increment: bad index pair");
    if (i == j) return Character<S>(basis_);
    return char_product(inverse_state(i), states_[j]);
  }

  double increment_norm(std::size_t i, std::size_t j) const {
    if (i > j || j >= states_.size()) throw std::invalid_argument("increment: bad index pair");
    if (i == j) return 0.0;
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (norms_.empty()) norms_.assign(states_.size() * (states_.size() - 1) / 2, -1.0);
      double v = norms_[pair_slot(i, j)];
      if (v >= 0.0) return v;
    }
    double v = char_norm(increment(i, j));
    std::lock_guard<std::mutex> lk(mu_);
    norms_[pair_slot(i, j)] = v;
    return v;
  }

 private:
  std::size_t pair_slot(std::size_t i, std::size_t j) const {
    return (j - 1) * j / 2 + i;  // 0 <= i < j
  }

  const Character<S>& inverse_state(std::size_t i) const {
    std::lock_guard<std::mutex> lk(mu_);
    if (!inv_[i]) inv_[i] = char_inverse(states_[i]);
    return *inv_[i];
  }

  double p_;
  std::shared_ptr<const HopfBasis> basis_;
  std::vector<double> grid_;
  std::vector<Character<S>> states_;
  mutable std::vector<std::optional<Character<S>>> inv_;
  mutable std::vector<double> norms_;
  mutable std::mutex mu_;
};

namespace detail {

template <class S>
S vertex_label_product(const std::vector<S>& delta, const Tree& t) {
  S out = delta[t.label() - 1];
  for (const auto& c : t.children()) out *= vertex_label_product(delta, c);
  return out;
}

}  // namespace detail

// Canonical lift of a piecewise linear path: on one linear segment every
// iterated integral collapses to (product of vertex-label increments) divided
// by the tree factorial; segments compose by the character product (Chen).
template <class S>
BranchedRoughPath<S> lift_bv(const PiecewiseLinearPath<S>& x, double p) {
  const int N = static_cast<int>(std::floor(p));
  if (N < 1 || N > 3) throw std::invalid_argument("lift_bv: truncation level must be 1, 2 or 3");
  auto basis = HopfBasis::get(N, x.dim());
  std::vector<double> grid;
  grid.reserve(x.times().size());
  for (const auto& t : x.times()) grid.push_back(to_double(t));

  std::vector<Character<S>> states;
  states.reserve(grid.size());
  states.emplace_back(basis);
  for (std::size_t seg = 0; seg < x.segment_count(); ++seg) {
    auto delta = x.segment_increment(seg);
    Character<S> step(basis);
    for (std::size_t ti = 0; ti < basis->trees().size(); ++ti) {
      S num = detail::vertex_label_product(delta, basis->trees()[ti]);
      step.tree_value(static_cast<int>(ti)) =
          num / S(static_cast<std::int64_t>(basis->tree_factorial(static_cast<int>(ti))));
    }
    states.push_back(char_product(states.back(), step));
  }
  return BranchedRoughPath<S>(p, basis, std::move(grid), std::move(states));
}

// Additive perturbation of one top-degree tree coefficient by phi(t)-phi(s).
// Top degree keeps Chen exact: the cross terms of the character product never
// reach a degree-N tree, so the new coefficient is simply additive.
template <class S>
BranchedRoughPath<S> perturb_top(const BranchedRoughPath<S>& X, const Tree& tau,
                                 const std::vector<S>& phi) {
  if (tau.degree() != X.N())
    throw std::invalid_argument("perturb_top: tree degree must equal the truncation level");
  if (phi.size() != X.size())
    throw std::invalid_argument("perturb_top: phi must be sampled on the grid");
  std::vector<Character<S>> states = X.states();
  for (std::size_t i = 0; i < states.size(); ++i)
    states[i].set_value(tau, states[i].value(tau) + phi[i] - phi[0]);
  return BranchedRoughPath<S>(X.p(), X.basis(), X.grid(), std::move(states));
}

// sup over grid partitions of sum ||X_{t_k,t_{k+1}}||^p, via the relaxation
// V(j) = max_{i<j} V(i) + ||X_{t_i,t_j}||^p; returns the 1/p power
template <class S>
double p_variation(const BranchedRoughPath<S>& X, double p, std::size_t i0, std::size_t i1) {
  if (i0 > i1 || i1 >= X.size()) throw std::invalid_argument("p_variation: bad index range");
  if (i0 == i1) return 0.0;
  std::vector<double> V(i1 - i0 + 1, 0.0);
  for (std::size_t j = 1; j < V.size(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      double cand = V[i] + std::pow(X.increment_norm(i0 + i, i0 + j), p);
      if (cand > best) best = cand;
    }
    V[j] = best;
  }
  return std::pow(V.back(), 1.0 / p);
}

template <class S>
double p_variation(const BranchedRoughPath<S>& X, double p) {
  return p_variation(X, p, 0, X.size() - 1);
}

// omega(s,t) = sum over the backing paths of ||X||_{p-var,[s,t]}^p. Views the
// paths it is given; keep them alive. Memoized per index pair.
template <class S>
class ControlOmega {
 public:
  ControlOmega(const BranchedRoughPath<S>& a, double p) : a_(&a), b_(nullptr), p_(p) {}
  ControlOmega(const BranchedRoughPath<S>& a, const BranchedRoughPath<S>& b, double p)
      : a_(&a), b_(&b), p_(p) {
    if (a.size() != b.size() || a.grid() != b.grid())
      throw std::invalid_argument("control: paths must share the grid");
  }

  double p() const { return p_; }
  const std::vector<double>& grid() const { return a_->grid(); }

  double operator()(std::size_t i, std::size_t j) const {
    if (i > j || j >= a_->size()) throw std::invalid_argument("control: bad index pair");
    if (i == j) return 0.0;
    std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | j;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    double v = std::pow(p_variation(*a_, p_, i, j), p_);
    if (b_) v += std::pow(p_variation(*b_, p_, i, j), p_);
    std::lock_guard<std::mutex> lk(mu_);
    memo_.emplace(key, v);
    return v;
  }

 private:
  const BranchedRoughPath<S>* a_;
  const BranchedRoughPath<S>* b_;
  double p_;
  mutable std::map<std::uint64_t, double> memo_;
  mutable std::mutex mu_;
};

// max over nonempty basis forests tau and grid pairs s < t of
// |(X1_{s,t},tau) - (X2_{s,t},tau)| / omega(s,t)^{|tau|/p}, with 0/0 = 0.
// Pairs whose omega vanishes under a nonzero numerator push the distance to
// +infinity; `offending` collects them when given. The default control is
// the two-path sum, which is positive whenever a numerator is, so the
// infinite branch can only fire with an externally supplied control.
template <class S>
double rho_distance(const BranchedRoughPath<S>& X1, const BranchedRoughPath<S>& X2,
                    const ControlOmega<S>* control = nullptr,
                    std::vector<std::pair<std::size_t, std::size_t>>* offending = nullptr) {
  if (X1.basis() != X2.basis()) throw std::invalid_argument("rho: paths over different bases");
  if (X1.grid() != X2.grid()) throw std::invalid_argument("rho: paths must share the grid");
  if (X1.p() != X2.p()) throw std::invalid_argument("rho: paths must share p");
  const double p = X1.p();
  const auto& basis = *X1.basis();
  std::optional<ControlOmega<S>> own;
  if (!control) {
    own.emplace(X1, X2, p);
    control = &*own;
  } else if (control->grid() != X1.grid()) {
    throw std::invalid_argument("rho: control built on a different grid");
  }
  const ControlOmega<S>& omega = *control;

  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < X1.size(); ++i)
    for (std::size_t j = i + 1; j < X1.size(); ++j) {
      auto a = X1.increment(i, j);
      auto b = X2.increment(i, j);
      double om = omega(i, j);
      for (std::size_t fi = 1; fi < basis.forests().size(); ++fi) {
        S num = a.forest_value(static_cast<int>(fi)) - b.forest_value(static_cast<int>(fi));
        if (num == S(0)) continue;
        if (om == 0.0) {
          if (offending) offending->push_back({i, j});
          worst = std::numeric_limits<double>::infinity();
          continue;
        }
        int deg = basis.forest_degree(static_cast<int>(fi));
        double ratio =
            std::abs(to_double(num)) / std::pow(om, static_cast<double>(deg) / p);
        if (ratio > worst) worst = ratio;
      }
    }
  return worst;
}

}  // namespace brp
