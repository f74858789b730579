#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "brp/forest.hpp"
#include "brp/rational.hpp"

namespace brp {

// One tensor term of a coproduct over the forest basis: coeff * left (x) right.
struct TensorTerm {
  int left;   // forest index
  int right;  // forest index
  std::int64_t coeff;
};

// Shared combinatorial data for a fixed truncation degree N and label count d:
// the basis of labeled trees/forests up to degree N, the admissible-cut
// coproduct (left factor = pruned part, right factor = root part), the
// subforest-splitting coproduct, and the grafting product of the dual side.
class HopfBasis {
 public:
  static std::shared_ptr<const HopfBasis> get(int N, int d);

  int N() const { return N_; }
  int d() const { return d_; }

  const std::vector<Tree>& trees() const { return trees_; }
  const std::vector<Forest>& forests() const { return forests_; }  // [0] = empty

  int tree_index(const Tree& t) const;
  int forest_index(const Forest& f) const;  // -1 when degree exceeds N
  int tree_to_forest(int ti) const { return tree_to_forest_[ti]; }
  int forest_degree(int fi) const { return forest_degree_[fi]; }
  const std::vector<std::pair<int, int>>& forest_items(int fi) const { return forest_items_[fi]; }
  const std::vector<int>& forests_of_degree(int n) const { return by_degree_[n]; }
  std::uint64_t sigma_tree(int ti) const { return sigma_tree_[ti]; }
  std::uint64_t sigma_forest(int fi) const { return sigma_forest_[fi]; }
  std::uint64_t tree_factorial(int ti) const { return treefact_[ti]; }

  // Admissible-cut coproduct of the i-th tree / forest, including the two
  // boundary terms; every right factor of a tree coproduct is a tree or empty.
  const std::vector<TensorTerm>& cut_coproduct_tree(int ti) const { return cut_tree_[ti]; }
  const std::vector<TensorTerm>& cut_coproduct_forest(int fi) const { return cut_forest_[fi]; }

  // Subforest-splitting coproduct (cocommutative; trees are primitive).
  const std::vector<TensorTerm>& split_coproduct(int fi) const { return split_[fi]; }

  // Grafting product of basis forests: trees of the first argument attach to
  // vertices of the second argument or fall to the ground; coefficients count
  // attachment maps. Result degree is the sum of the degrees (must be <= N).
  const std::vector<std::pair<int, std::int64_t>>& graft_product(int fi, int gi) const;

 private:
  HopfBasis(int N, int d);

  int N_, d_;
  std::vector<Tree> trees_;
  std::vector<Forest> forests_;
  std::unordered_map<std::string, int> tree_by_key_, forest_by_key_;
  std::vector<int> tree_to_forest_, forest_degree_;
  std::vector<std::vector<std::pair<int, int>>> forest_items_;
  std::vector<std::vector<int>> by_degree_;
  std::vector<std::uint64_t> sigma_tree_, sigma_forest_, treefact_;
  std::vector<std::vector<TensorTerm>> cut_tree_, cut_forest_, split_;
  mutable std::map<std::pair<int, int>, std::vector<std::pair<int, std::int64_t>>> graft_cache_;
  mutable std::mutex mu_;
};

// Multiplicative functional on forests, determined by its values on trees.
template <class S>
class Character {
 public:
  explicit Character(std::shared_ptr<const HopfBasis> basis)
      : basis_(std::move(basis)), tv_(basis_->trees().size(), S(0)) {}

  const std::shared_ptr<const HopfBasis>& basis() const { return basis_; }
  int N() const { return basis_->N(); }
  int d() const { return basis_->d(); }

  const S& tree_value(int ti) const { return tv_[ti]; }
  S& tree_value(int ti) { return tv_[ti]; }
  const S& value(const Tree& t) const { return tv_[basis_->tree_index(t)]; }
  void set_value(const Tree& t, const S& v) { tv_[basis_->tree_index(t)] = v; }

  S forest_value(int fi) const {
    S acc(1);
    for (const auto& [ti, mult] : basis_->forest_items(fi)) {
      const S& v = tv_[ti];
      for (int k = 0; k < mult; ++k) acc *= v;
    }
    return acc;
  }
  S value(const Forest& f) const {
    int fi = basis_->forest_index(f);
    if (fi < 0) throw std::invalid_argument("forest degree exceeds truncation");
    return forest_value(fi);
  }

  bool operator==(const Character& o) const { return tv_ == o.tv_; }

 private:
  std::shared_ptr<const HopfBasis> basis_;
  std::vector<S> tv_;
};

namespace detail {
inline void check_same_basis(const HopfBasis& a, const HopfBasis& b) {
  if (&a != &b) throw std::invalid_argument("operands built over different bases");
}
}  // namespace detail

// Convolution product dual to the admissible-cut coproduct; the left cut
// factor is evaluated in `a`, the root factor in `b`, so composing increments
// left-to-right matches path concatenation order.
template <class S>
Character<S> char_product(const Character<S>& a, const Character<S>& b) {
  detail::check_same_basis(*a.basis(), *b.basis());
  const auto& basis = *a.basis();
  Character<S> out(a.basis());
  for (std::size_t ti = 0; ti < basis.trees().size(); ++ti) {
    S acc(0);
    for (const auto& term : basis.cut_coproduct_tree(static_cast<int>(ti)))
      acc += S(term.coeff) * a.forest_value(term.left) * b.forest_value(term.right);
    out.tree_value(static_cast<int>(ti)) = acc;
  }
  return out;
}

// Group inverse by the triangular solve (a * inv)(tau) = 0, degree by degree.
template <class S>
Character<S> char_inverse(const Character<S>& a) {
  const auto& basis = *a.basis();
  Character<S> inv(a.basis());
  // trees are sorted by degree, so dependencies are already filled
  for (std::size_t ti = 0; ti < basis.trees().size(); ++ti) {
    S acc = a.tree_value(static_cast<int>(ti));
    for (const auto& term : basis.cut_coproduct_tree(static_cast<int>(ti))) {
      if (basis.forest_degree(term.left) == 0 || basis.forest_degree(term.right) == 0) continue;
      acc += S(term.coeff) * a.forest_value(term.left) * inv.forest_value(term.right);
    }
    inv.tree_value(static_cast<int>(ti)) = -acc;
  }
  return inv;
}

// max over nonempty basis forests of |value|^{1/degree}
template <class S>
double char_norm(const Character<S>& a) {
  const auto& basis = *a.basis();
  double best = 0.0;
  for (std::size_t fi = 1; fi < basis.forests().size(); ++fi) {
    double v = std::abs(to_double(a.forest_value(static_cast<int>(fi))));
    int deg = basis.forest_degree(static_cast<int>(fi));
    double h = std::pow(v, 1.0 / deg);
    if (h > best) best = h;
  }
  return best;
}

// Element of the dual (grafting) side: a linear combination of basis forests.
template <class S>
class ForestPoly {
 public:
  explicit ForestPoly(std::shared_ptr<const HopfBasis> basis)
      : basis_(std::move(basis)), c_(basis_->forests().size(), S(0)) {}

  static ForestPoly unit(std::shared_ptr<const HopfBasis> basis) {
    ForestPoly p(std::move(basis));
    p.c_[0] = S(1);
    return p;
  }

  const std::shared_ptr<const HopfBasis>& basis() const { return basis_; }
  const std::vector<S>& coeffs() const { return c_; }
  std::vector<S>& coeffs() { return c_; }
  const S& operator[](int fi) const { return c_[fi]; }
  S& operator[](int fi) { return c_[fi]; }

  ForestPoly& operator+=(const ForestPoly& o) {
    detail::check_same_basis(*basis_, *o.basis_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  ForestPoly& operator-=(const ForestPoly& o) {
    detail::check_same_basis(*basis_, *o.basis_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  ForestPoly& operator*=(const S& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend ForestPoly operator+(ForestPoly a, const ForestPoly& b) { return a += b; }
  friend ForestPoly operator-(ForestPoly a, const ForestPoly& b) { return a -= b; }

  bool is_zero() const {
    for (const auto& x : c_)
      if (!(x == S(0))) return false;
    return true;
  }

  // part of degree exactly n (degree 0 = unit coefficient)
  ForestPoly graded_part(int n) const {
    ForestPoly out(basis_);
    if (n == 0) {
      out.c_[0] = c_[0];
      return out;
    }
    for (int fi : basis_->forests_of_degree(n)) out.c_[fi] = c_[fi];
    return out;
  }

 private:
  std::shared_ptr<const HopfBasis> basis_;
  std::vector<S> c_;
};

// Bilinear extension of the grafting product, truncated at degree N.
template <class S>
ForestPoly<S> gl_product(const ForestPoly<S>& a, const ForestPoly<S>& b) {
  detail::check_same_basis(*a.basis(), *b.basis());
  const auto& basis = *a.basis();
  ForestPoly<S> out(a.basis());
  const int N = basis.N();
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    if (a.coeffs()[i] == S(0)) continue;
    int di = basis.forest_degree(static_cast<int>(i));
    for (std::size_t j = 0; j < b.coeffs().size(); ++j) {
      if (b.coeffs()[j] == S(0)) continue;
      if (di + basis.forest_degree(static_cast<int>(j)) > N) continue;
      S f = a.coeffs()[i] * b.coeffs()[j];
      for (const auto& [k, coeff] : basis.graft_product(static_cast<int>(i), static_cast<int>(j)))
        out[k] += f * S(coeff);
    }
  }
  return out;
}

// Grafting product of two single basis forests as a ForestPoly.
template <class S>
ForestPoly<S> gl_product_basis(std::shared_ptr<const HopfBasis> basis, int fi, int gi) {
  ForestPoly<S> out(basis);
  for (const auto& [k, coeff] : basis->graft_product(fi, gi)) out[k] += S(coeff);
  return out;
}

// Subforest-splitting coproduct extended linearly; sparse tensor output.
template <class S>
std::map<std::pair<int, int>, S> split_coproduct(const ForestPoly<S>& a) {
  const auto& basis = *a.basis();
  std::map<std::pair<int, int>, S> out;
  for (std::size_t fi = 0; fi < a.coeffs().size(); ++fi) {
    if (a.coeffs()[fi] == S(0)) continue;
    for (const auto& term : basis.split_coproduct(static_cast<int>(fi)))
      out[{term.left, term.right}] += a.coeffs()[fi] * S(term.coeff);
  }
  for (auto it = out.begin(); it != out.end();)
    it = (it->second == S(0)) ? out.erase(it) : std::next(it);
  return out;
}

// Divide each forest value by its symmetry factor; the image of any
// character is group-like for the splitting coproduct.
template <class S>
ForestPoly<S> rescale(const Character<S>& a) {
  const auto& basis = *a.basis();
  ForestPoly<S> out(a.basis());
  out[0] = S(1);
  for (std::size_t fi = 1; fi < basis.forests().size(); ++fi)
    out[static_cast<int>(fi)] =
        a.forest_value(static_cast<int>(fi)) / S(basis.sigma_forest(static_cast<int>(fi)));
  return out;
}

template <class S>
Character<S> rescale_inv(const ForestPoly<S>& g) {
  const auto& basis = *g.basis();
  Character<S> out(g.basis());
  for (std::size_t ti = 0; ti < basis.trees().size(); ++ti)
    out.tree_value(static_cast<int>(ti)) =
        g[basis.tree_to_forest(static_cast<int>(ti))] * S(basis.sigma_tree(static_cast<int>(ti)));
  return out;
}

// Group-likeness for the splitting coproduct. Exact when tol = 0.
template <class S>
bool is_group_like(const ForestPoly<S>& a, double tol, double* worst = nullptr) {
  const auto& basis = *a.basis();
  double w = 0.0;
  if (!(a[0] == S(1))) {
    w = std::abs(to_double(a[0]) - 1.0);
    if (tol == 0.0 || w > tol) {
      if (worst) *worst = w;
      return false;
    }
  }
  for (std::size_t fi = 0; fi < a.coeffs().size(); ++fi) {
    for (const auto& term : basis.split_coproduct(static_cast<int>(fi))) {
      S lhs = S(term.coeff) * a.coeffs()[fi];
      S rhs = a[term.left] * a[term.right];
      if (lhs == rhs) continue;
      double diff = std::abs(to_double(lhs) - to_double(rhs));
      if (diff > w) w = diff;
      if (tol == 0.0 || diff > tol) {
        if (worst) *worst = w;
        return false;
      }
    }
  }
  if (worst) *worst = w;
  return true;
}

// The projection killing products: log-of-identity under convolution for the
// splitting coproduct, computed on basis forests and extended linearly.
// Output coefficients are rational regardless of input scalar.
ForestPoly<Rational> eulerian_idempotent_basis(const std::shared_ptr<const HopfBasis>& basis,
                                               int fi);

template <class S>
ForestPoly<S> eulerian_idempotent(const ForestPoly<S>& a) {
  ForestPoly<S> out(a.basis());
  for (std::size_t fi = 1; fi < a.coeffs().size(); ++fi) {
    if (a.coeffs()[fi] == S(0)) continue;
    const auto pi = eulerian_idempotent_basis(a.basis(), static_cast<int>(fi));
    for (std::size_t k = 0; k < pi.coeffs().size(); ++k)
      if (!(pi.coeffs()[k] == 0))
        out[static_cast<int>(k)] += a.coeffs()[fi] * scalar_from_rational<S>(pi.coeffs()[k]);
  }
  return out;
}

}  // namespace brp
