#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "brp/rational.hpp"

namespace brp {

// Multivariate polynomial with exact coefficient arithmetic when S is
// Rational. Terms are exponent-vector -> coefficient, zero terms dropped.
template <class S>
class Polynomial {
 public:
  explicit Polynomial(int vars) : vars_(vars) {
    if (vars < 0) throw std::invalid_argument("polynomial: negative variable count");
  }

  static Polynomial constant(int vars, const S& c) {
    Polynomial p(vars);
    p.add_term(std::vector<int>(vars, 0), c);
    return p;
  }

  static Polynomial variable(int vars, int j) {
    Polynomial p(vars);
    std::vector<int> e(vars, 0);
    e.at(j) = 1;
    p.add_term(e, S(1));
    return p;
  }

  int vars() const { return vars_; }
  const std::map<std::vector<int>, S>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  int degree() const {
    int best = 0;
    for (const auto& [e, c] : t_) {
      int deg = 0;
      for (int k : e) deg += k;
      if (deg > best) best = deg;
    }
    return best;
  }

  void add_term(const std::vector<int>& exps, const S& c) {
    if (static_cast<int>(exps.size()) != vars_)
      throw std::invalid_argument("polynomial: exponent arity mismatch");
    for (int k : exps)
      if (k < 0) throw std::invalid_argument("polynomial: negative exponent");
    auto it = t_.find(exps);
    if (it == t_.end()) {
      if (!(c == S(0))) t_[exps] = c;
    } else {
      it->second += c;
      if (it->second == S(0)) t_.erase(it);
    }
  }

  S eval(const std::vector<S>& y) const {
    if (static_cast<int>(y.size()) != vars_)
      throw std::invalid_argument("polynomial: evaluation arity mismatch");
    S acc(0);
    for (const auto& [e, c] : t_) {
      S term = c;
      for (int j = 0; j < vars_; ++j)
        for (int k = 0; k < e[j]; ++k) term *= y[j];
      acc += term;
    }
    return acc;
  }

  Polynomial partial(int j) const {
    Polynomial out(vars_);
    for (const auto& [e, c] : t_) {
      if (e[j] == 0) continue;
      std::vector<int> e2 = e;
      e2[j] -= 1;
      out.add_term(e2, c * S(e[j]));
    }
    return out;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.t_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.t_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const S& s) {
    if (s == S(0)) {
      t_.clear();
      return *this;
    }
    for (auto& [e, c] : t_) c *= s;
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_arity(b);
    Polynomial out(a.vars_);
    for (const auto& [ea, ca] : a.t_)
      for (const auto& [eb, cb] : b.t_) {
        std::vector<int> e = ea;
        for (int j = 0; j < a.vars_; ++j) e[j] += eb[j];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  bool operator==(const Polynomial& o) const { return vars_ == o.vars_ && t_ == o.t_; }

 private:
  void check_arity(const Polynomial& o) const {
    if (vars_ != o.vars_) throw std::invalid_argument("polynomial: variable count mismatch");
  }
  int vars_;
  std::map<std::vector<int>, S> t_;
};

// map R^vars -> R^(size), each coordinate a polynomial
template <class S>
using PolyMap = std::vector<Polynomial<S>>;

template <class S>
std::vector<S> eval_map(const PolyMap<S>& m, const std::vector<S>& y) {
  std::vector<S> out(m.size(), S(0));
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i].eval(y);
  return out;
}

template <class S>
PolyMap<S> identity_map(int e) {
  PolyMap<S> out;
  out.reserve(e);
  for (int i = 0; i < e; ++i) out.push_back(Polynomial<S>::variable(e, i));
  return out;
}

}  // namespace brp
