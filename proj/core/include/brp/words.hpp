#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "brp/ck_hopf.hpp"
#include "brp/matrix.hpp"
#include "brp/pl_path.hpp"

namespace brp {

// letters 1..K over the generator alphabet; () is the empty word
using Word = std::vector<int>;

// Weighted generator alphabet for truncation degree n and label count d.
// Generators are trees selected degree by degree: a candidate tree is kept
// when it extends the span of grafting products of lower-degree generators.
// All per-degree data needed by the word<->forest isomorphism is built here:
// word lists, isomorphism matrices with exact inverses, and the Lyndon
// bracket expansions used for Lie-membership solves.
class Alphabet {
 public:
  static std::shared_ptr<const Alphabet> get(int n, int d);

  int n() const { return basis_->N(); }
  int d() const { return basis_->d(); }
  int K() const { return static_cast<int>(generators_.size()); }
  const std::shared_ptr<const HopfBasis>& basis() const { return basis_; }

  int generator_tree(int j) const { return generators_.at(j - 1); }     // letter 1..K
  int generator_forest(int j) const {
    return basis_->tree_to_forest(generators_.at(j - 1));
  }
  int weight(int j) const { return weights_.at(j - 1); }

  int word_degree(const Word& w) const {
    int deg = 0;
    for (int j : w) deg += weight(j);
    return deg;
  }

  const std::vector<Word>& words_of_degree(int m) const { return words_.at(m); }
  int word_position(const Word& w) const;
  int forest_position(int fi) const { return forest_pos_.at(fi); }

  const std::vector<Word>& lyndon_of_degree(int m) const { return lyndon_.at(m); }

  // column w = forest coordinates of the image of word w, degree m block
  const Matrix<Rational>& phi_matrix(int m) const { return phi_.at(m); }
  const Matrix<Rational>& phi_inverse_matrix(int m) const { return phi_inv_.at(m); }
  const Matrix<double>& phi_matrix_d(int m) const { return phi_d_.at(m); }
  const Matrix<double>& phi_inverse_matrix_d(int m) const { return phi_inv_d_.at(m); }

  // rows = bracket expansions of Lyndon words of degree m over words of degree m
  const Matrix<Rational>& lyndon_expansion(int m) const { return lyn_exp_.at(m); }

  // solve c^T B = t^T through the pivot submatrix; residual (B^T c - t) tells
  // whether t lies in the Lie row span (exactly zero for members)
  std::vector<Rational> lie_solve(int m, const std::vector<Rational>& t,
                                  std::vector<Rational>* residual) const;
  std::vector<double> lie_solve(int m, const std::vector<double>& t,
                                std::vector<double>* residual) const;

 private:
  Alphabet(int n, int d);
  ForestPoly<Rational> word_image(const Word& w) const;

  std::shared_ptr<const HopfBasis> basis_;
  std::vector<int> generators_;  // tree indices, selection order
  std::vector<int> weights_;
  std::vector<std::vector<Word>> words_;  // by degree; [0] = {empty}
  std::vector<std::map<Word, int>> word_pos_;
  std::map<int, int> forest_pos_;  // forest index -> position within its degree
  std::vector<std::vector<Word>> lyndon_;
  std::vector<Matrix<Rational>> phi_, phi_inv_;
  std::vector<Matrix<double>> phi_d_, phi_inv_d_;
  std::vector<Matrix<Rational>> lyn_exp_;
  std::vector<Matrix<double>> lyn_exp_d_;
  std::vector<std::vector<std::size_t>> lyn_pivot_;
  std::vector<Matrix<Rational>> lyn_solve_;  // inverse of pivot-submatrix transpose
  std::vector<Matrix<double>> lyn_solve_d_;
};

// standard factorization w = uv of a Lyndon word of length >= 2, with v the
// lexicographically least proper suffix; both factors are Lyndon
std::pair<Word, Word> standard_factorization(const Word& w);

bool is_lyndon(const Word& w);

// expansion of the right-nested standard bracketing of a Lyndon word
std::map<Word, Rational> bracket_expansion(const Word& w);

// subsequence/complement splittings of a word, one per position subset
std::vector<std::pair<Word, Word>> deshuffle_pairs(const Word& w);

// Truncated series over words of degree <= n; no zero coefficients stored.
template <class S>
class WordSeries {
 public:
  WordSeries(std::shared_ptr<const Alphabet> alph, int n) : alph_(std::move(alph)), n_(n) {
    if (n_ < 0 || n_ > alph_->n()) throw std::invalid_argument("series truncation out of range");
  }

  static WordSeries unit(std::shared_ptr<const Alphabet> alph, int n) {
    WordSeries s(std::move(alph), n);
    s.c_[Word{}] = S(1);
    return s;
  }

  const std::shared_ptr<const Alphabet>& alphabet() const { return alph_; }
  int truncation() const { return n_; }
  const std::map<Word, S>& terms() const { return c_; }

  S coeff(const Word& w) const {
    auto it = c_.find(w);
    return it == c_.end() ? S(0) : it->second;
  }

  void set(const Word& w, const S& v) {
    if (alph_->word_degree(w) > n_) throw std::invalid_argument("word degree above truncation");
    if (v == S(0))
      c_.erase(w);
    else
      c_[w] = v;
  }

  WordSeries& operator+=(const WordSeries& o) {
    check_compatible(o);
    for (const auto& [w, v] : o.c_) {
      auto it = c_.find(w);
      if (it == c_.end()) {
        if (!(v == S(0))) c_[w] = v;
      } else {
        it->second += v;
        if (it->second == S(0)) c_.erase(it);
      }
    }
    return *this;
  }
  WordSeries& operator-=(const WordSeries& o) {
    check_compatible(o);
    for (const auto& [w, v] : o.c_) {
      auto it = c_.find(w);
      if (it == c_.end()) {
        if (!(v == S(0))) c_[w] = -v;
      } else {
        it->second -= v;
        if (it->second == S(0)) c_.erase(it);
      }
    }
    return *this;
  }
  WordSeries& operator*=(const S& s) {
    if (s == S(0)) {
      c_.clear();
      return *this;
    }
    for (auto& [w, v] : c_) v *= s;
    return *this;
  }
  friend WordSeries operator+(WordSeries a, const WordSeries& b) { return a += b; }
  friend WordSeries operator-(WordSeries a, const WordSeries& b) { return a -= b; }

  bool operator==(const WordSeries& o) const {
    return alph_ == o.alph_ && n_ == o.n_ && c_ == o.c_;
  }

  // part of degree exactly m
  WordSeries graded_part(int m) const {
    WordSeries out(alph_, n_);
    for (const auto& [w, v] : c_)
      if (alph_->word_degree(w) == m) out.c_[w] = v;
    return out;
  }

  void check_compatible(const WordSeries& o) const {
    if (alph_ != o.alph_ || n_ != o.n_)
      throw std::invalid_argument("series over different alphabets or truncations");
  }

 private:
  std::shared_ptr<const Alphabet> alph_;
  int n_;
  std::map<Word, S> c_;
};

template <class S>
WordSeries<S> concat_product(const WordSeries<S>& a, const WordSeries<S>& b) {
  a.check_compatible(b);
  const auto& alph = *a.alphabet();
  WordSeries<S> out(a.alphabet(), a.truncation());
  for (const auto& [u, cu] : a.terms()) {
    int du = alph.word_degree(u);
    for (const auto& [v, cv] : b.terms()) {
      if (du + alph.word_degree(v) > a.truncation()) continue;
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      out.set(w, out.coeff(w) + cu * cv);
    }
  }
  return out;
}

template <class S>
WordSeries<S> word_exp(const WordSeries<S>& a) {
  if (!(a.coeff(Word{}) == S(0)))
    throw std::invalid_argument("word_exp: nonzero empty-word coefficient");
  WordSeries<S> out = WordSeries<S>::unit(a.alphabet(), a.truncation());
  WordSeries<S> pw = WordSeries<S>::unit(a.alphabet(), a.truncation());
  S fact(1);
  for (int k = 1; k <= a.truncation(); ++k) {
    pw = concat_product(pw, a);
    fact *= S(k);
    WordSeries<S> term = pw;
    term *= S(1) / fact;
    out += term;
  }
  return out;
}

template <class S>
WordSeries<S> word_log(const WordSeries<S>& a) {
  if (!(a.coeff(Word{}) == S(1)))
    throw std::invalid_argument("word_log: empty-word coefficient must be 1");
  WordSeries<S> x = a;
  WordSeries<S> unit = WordSeries<S>::unit(a.alphabet(), a.truncation());
  x -= unit;
  WordSeries<S> out(a.alphabet(), a.truncation());
  WordSeries<S> pw = unit;
  S sign(1);
  for (int k = 1; k <= a.truncation(); ++k, sign = -sign) {
    pw = concat_product(pw, x);
    WordSeries<S> term = pw;
    term *= sign / S(k);
    out += term;
  }
  return out;
}

template <class S>
WordSeries<S> group_inverse(const WordSeries<S>& a) {
  auto neg = word_log(a);
  neg *= S(-1);
  return word_exp(neg);
}

// degree-m coefficients scale by mu^m
template <class S>
WordSeries<S> dilation(const WordSeries<S>& a, const S& mu) {
  WordSeries<S> out(a.alphabet(), a.truncation());
  for (const auto& [w, v] : a.terms()) {
    S f = v;
    for (int k = 0; k < a.alphabet()->word_degree(w); ++k) f *= mu;
    out.set(w, f);
  }
  return out;
}

// sum over nonempty words of |coefficient|^{1/degree}
template <class S>
double group_norm(const WordSeries<S>& a) {
  double acc = 0.0;
  for (const auto& [w, v] : a.terms()) {
    if (w.empty()) continue;
    acc += std::pow(std::abs(to_double(v)), 1.0 / a.alphabet()->word_degree(w));
  }
  return acc;
}

// truncated signature of a piecewise-linear path with K components; a single
// linear segment contributes increment products over word length factorial,
// segments compose by the truncated concatenation product
template <class S>
WordSeries<S> signature(const PiecewiseLinearPath<S>& x,
                        const std::shared_ptr<const Alphabet>& alph, int n) {
  if (x.dim() != alph->K()) throw std::invalid_argument("signature: path dimension != K");
  WordSeries<S> acc = WordSeries<S>::unit(alph, n);
  for (std::size_t seg = 0; seg < x.segment_count(); ++seg) {
    auto inc = x.segment_increment(seg);
    WordSeries<S> s(alph, n);
    for (int m = 0; m <= n; ++m)
      for (const auto& w : alph->words_of_degree(m)) {
        S c(1);
        for (int j : w) c *= inc[j - 1];
        S fact(1);
        for (int k = 2; k <= static_cast<int>(w.size()); ++k) fact *= S(k);
        c /= fact;
        if (!(c == S(0))) s.set(w, c);
      }
    acc = concat_product(acc, s);
  }
  return acc;
}

// algebra morphism onto the grafting side: letters to generator trees, words
// to grafting products; block-diagonal over degree
template <class S>
ForestPoly<S> phi(const WordSeries<S>& a) {
  const auto& alph = *a.alphabet();
  ForestPoly<S> out(alph.basis());
  out[0] = a.coeff(Word{});
  for (int m = 1; m <= a.truncation(); ++m) {
    const auto& words = alph.words_of_degree(m);
    std::vector<S> c(words.size(), S(0));
    bool any = false;
    for (std::size_t i = 0; i < words.size(); ++i) {
      c[i] = a.coeff(words[i]);
      if (!(c[i] == S(0))) any = true;
    }
    if (!any) continue;
    std::vector<S> g;
    if constexpr (std::is_same_v<S, Rational>)
      g = alph.phi_matrix(m).mul(c);
    else
      g = alph.phi_matrix_d(m).mul(c);
    const auto& degm = alph.basis()->forests_of_degree(m);
    for (std::size_t i = 0; i < degm.size(); ++i) out[degm[i]] += g[i];
  }
  return out;
}

template <class S>
WordSeries<S> phi_inverse(const std::shared_ptr<const Alphabet>& alph, const ForestPoly<S>& g,
                          int n) {
  if (alph->basis() != g.basis())
    throw std::invalid_argument("phi_inverse: alphabet and element bases differ");
  WordSeries<S> out(alph, n);
  out.set(Word{}, g[0]);
  for (int m = 1; m <= n; ++m) {
    const auto& degm = alph->basis()->forests_of_degree(m);
    std::vector<S> v(degm.size(), S(0));
    bool any = false;
    for (std::size_t i = 0; i < degm.size(); ++i) {
      v[i] = g[degm[i]];
      if (!(v[i] == S(0))) any = true;
    }
    if (!any) continue;
    std::vector<S> c;
    if constexpr (std::is_same_v<S, Rational>)
      c = alph->phi_inverse_matrix(m).mul(v);
    else
      c = alph->phi_inverse_matrix_d(m).mul(v);
    const auto& words = alph->words_of_degree(m);
    for (std::size_t i = 0; i < words.size(); ++i)
      if (!(c[i] == S(0))) out.set(words[i], c[i]);
  }
  return out;
}

// Lyndon coordinates of a Lie-candidate series (typically a truncated log):
// per degree, coefficients over lyndon_of_degree(m); residual measures the
// non-Lie part, exactly zero for genuine group logarithms in rational mode
template <class S>
struct LyndonDecomposition {
  std::vector<std::vector<S>> coeffs;  // index = degree
  double max_residual = 0.0;
  bool exact_member = true;  // meaningful in rational mode
};

template <class S>
LyndonDecomposition<S> lyndon_decompose(const WordSeries<S>& logseries) {
  const auto& alph = *logseries.alphabet();
  LyndonDecomposition<S> out;
  out.coeffs.resize(logseries.truncation() + 1);
  if (!(logseries.coeff(Word{}) == S(0)))
    throw std::invalid_argument("lyndon_decompose: nonzero empty-word coefficient");
  for (int m = 1; m <= logseries.truncation(); ++m) {
    const auto& words = alph.words_of_degree(m);
    std::vector<S> t(words.size(), S(0));
    for (std::size_t i = 0; i < words.size(); ++i) t[i] = logseries.coeff(words[i]);
    std::vector<S> residual;
    out.coeffs[m] = alph.lie_solve(m, t, &residual);
    for (const auto& r : residual) {
      if (!(r == S(0))) out.exact_member = false;
      double a = std::abs(to_double(r));
      if (a > out.max_residual) out.max_residual = a;
    }
  }
  return out;
}

}  // namespace brp
