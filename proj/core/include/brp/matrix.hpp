#pragma once

#include <stdexcept>
#include <vector>

#include "brp/rational.hpp"

namespace brp {

// Small dense matrices; exact elimination when T = Rational.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, T(0)) {}

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  std::vector<T> mul(const std::vector<T>& x) const {
    if (x.size() != c_) throw std::invalid_argument("Matrix::mul: size mismatch");
    std::vector<T> y(r_, T(0));
    for (std::size_t i = 0; i < r_; ++i) {
      T acc(0);
      for (std::size_t j = 0; j < c_; ++j)
        if (!(a_[i * c_ + j] == T(0))) acc += a_[i * c_ + j] * x[j];
      y[i] = acc;
    }
    return y;
  }

  // Gauss-Jordan inverse; throws on singular input.
  Matrix inverse() const {
    if (r_ != c_) throw std::invalid_argument("Matrix::inverse: not square");
    Matrix aug = *this;
    Matrix inv(r_, r_);
    for (std::size_t i = 0; i < r_; ++i) inv(i, i) = T(1);
    for (std::size_t col = 0; col < c_; ++col) {
      std::size_t piv = col;
      while (piv < r_ && aug(piv, col) == T(0)) ++piv;
      if (piv == r_) throw std::runtime_error("Matrix::inverse: singular matrix");
      if (piv != col) {
        for (std::size_t j = 0; j < c_; ++j) {
          std::swap(aug(piv, j), aug(col, j));
          std::swap(inv(piv, j), inv(col, j));
        }
      }
      T d = aug(col, col);
      for (std::size_t j = 0; j < c_; ++j) {
        aug(col, j) /= d;
        inv(col, j) /= d;
      }
      for (std::size_t i = 0; i < r_; ++i) {
        if (i == col) continue;
        T f = aug(i, col);
        if (f == T(0)) continue;
        for (std::size_t j = 0; j < c_; ++j) {
          aug(i, j) -= f * aug(col, j);
          inv(i, j) -= f * inv(col, j);
        }
      }
    }
    return inv;
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> a_;
};

// Incremental exact row space; insert returns true when the vector was
// independent of the rows already present.
class SpanBuilder {
 public:
  explicit SpanBuilder(std::size_t dim) : dim_(dim) {}

  std::size_t rank() const { return rows_.size(); }

  bool contains(std::vector<Rational> v) const { return !reduce(v); }

  bool insert(std::vector<Rational> v) {
    if (!reduce(v)) return false;
    std::size_t p = pivot_of(v);
    Rational d = v[p];
    for (auto& x : v) x /= d;
    // keep rows mutually reduced so a single reduction pass stays exact
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Rational f = rows_[k][p];
      if (f == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j)
        if (v[j] != 0) rows_[k][j] -= f * v[j];
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(p);
    return true;
  }

 private:
  static std::size_t pivot_of(const std::vector<Rational>& v) {
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[j] != 0) return j;
    throw std::logic_error("pivot_of: zero vector");
  }

  // Reduce v against stored rows; returns true if a nonzero remainder is left.
  bool reduce(std::vector<Rational>& v) const {
    if (v.size() != dim_) throw std::invalid_argument("SpanBuilder: dimension mismatch");
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Rational& f = v[pivots_[k]];
      if (f == 0) continue;
      Rational fac = f;  // rows are pivot-normalized
      for (std::size_t j = 0; j < dim_; ++j)
        if (rows_[k][j] != 0) v[j] -= fac * rows_[k][j];
    }
    for (const auto& x : v)
      if (x != 0) return true;
    return false;
  }

  std::size_t dim_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace brp
