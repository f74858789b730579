#include "brp/words.hpp"

#include <algorithm>
#include <mutex>
#include <string>

namespace brp {

namespace {

template <class T>
Matrix<double> to_double_matrix(const Matrix<T>& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

// all Lyndon words of length <= maxlen over letters 1..K, lexicographic
std::vector<Word> all_lyndon(int K, int maxlen) {
  std::vector<Word> out;
  Word w{1};
  for (;;) {
    out.push_back(w);
    Word t;
    while (static_cast<int>(t.size()) < maxlen) t.push_back(w[t.size() % w.size()]);
    while (!t.empty() && t.back() == K) t.pop_back();
    if (t.empty()) break;
    ++t.back();
    w = t;
  }
  return out;
}

void gen_words(int K, const std::vector<int>& weights, int remaining, Word& acc,
               std::vector<Word>& out, std::size_t min_len) {
  if (remaining == 0) {
    if (acc.size() >= min_len) out.push_back(acc);
    return;
  }
  for (int j = 1; j <= K; ++j) {
    if (weights[j - 1] > remaining) continue;
    acc.push_back(j);
    gen_words(K, weights, remaining - weights[j - 1], acc, out, min_len);
    acc.pop_back();
  }
}

}  // namespace

bool is_lyndon(const Word& w) {
  if (w.empty()) return false;
  for (std::size_t i = 1; i < w.size(); ++i) {
    Word suffix(w.begin() + i, w.end());
    if (!(w < suffix)) return false;
  }
  return true;
}

std::pair<Word, Word> standard_factorization(const Word& w) {
  if (w.size() < 2) throw std::invalid_argument("standard_factorization: word too short");
  std::size_t best = 1;
  for (std::size_t i = 2; i < w.size(); ++i) {
    if (std::lexicographical_compare(w.begin() + i, w.end(), w.begin() + best, w.end()))
      best = i;
  }
  return {Word(w.begin(), w.begin() + best), Word(w.begin() + best, w.end())};
}

std::map<Word, Rational> bracket_expansion(const Word& w) {
  if (w.size() == 1) return {{w, Rational(1)}};
  auto [u, v] = standard_factorization(w);
  auto eu = bracket_expansion(u);
  auto ev = bracket_expansion(v);
  std::map<Word, Rational> out;
  auto fma = [&out](const std::map<Word, Rational>& a, const std::map<Word, Rational>& b,
                    const Rational& sign) {
    for (const auto& [x, cx] : a)
      for (const auto& [y, cy] : b) {
        Word xy = x;
        xy.insert(xy.end(), y.begin(), y.end());
        out[xy] += sign * cx * cy;
      }
  };
  fma(eu, ev, Rational(1));
  fma(ev, eu, Rational(-1));
  for (auto it = out.begin(); it != out.end();)
    it = (it->second == 0) ? out.erase(it) : std::next(it);
  return out;
}

std::vector<std::pair<Word, Word>> deshuffle_pairs(const Word& w) {
  std::vector<std::pair<Word, Word>> out;
  const std::size_t m = w.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    Word u, v;
    for (std::size_t i = 0; i < m; ++i)
      ((mask >> i) & 1 ? u : v).push_back(w[i]);
    out.push_back({std::move(u), std::move(v)});
  }
  return out;
}

std::shared_ptr<const Alphabet> Alphabet::get(int n, int d) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const Alphabet>> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = registry[{n, d}];
  if (!slot) slot = std::shared_ptr<const Alphabet>(new Alphabet(n, d));
  return slot;
}

ForestPoly<Rational> Alphabet::word_image(const Word& w) const {
  ForestPoly<Rational> acc = ForestPoly<Rational>::unit(basis_);
  for (int j : w) {
    ForestPoly<Rational> g(basis_);
    g[generator_forest(j)] = 1;
    acc = gl_product(acc, g);
  }
  return acc;
}

Alphabet::Alphabet(int n, int d) {
  basis_ = HopfBasis::get(n, d);

  for (int m = 1; m <= n; ++m) {
    const auto& degm = basis_->forests_of_degree(m);
    for (std::size_t i = 0; i < degm.size(); ++i) forest_pos_[degm[i]] = static_cast<int>(i);

    // span of products of at least two lower-degree generators
    SpanBuilder span(degm.size());
    std::vector<Word> prods;
    Word acc;
    gen_words(K(), weights_, m, acc, prods, 2);
    for (const auto& w : prods) {
      auto img = word_image(w);
      std::vector<Rational> v(degm.size());
      for (std::size_t i = 0; i < degm.size(); ++i) v[i] = img[degm[i]];
      span.insert(std::move(v));
    }

    // candidate trees in canonical order complete the degree
    for (const auto& t : basis_->trees()) {
      if (t.degree() != m) continue;
      int ti = basis_->tree_index(t);
      std::vector<Rational> v(degm.size(), Rational(0));
      v[forest_pos_.at(basis_->tree_to_forest(ti))] = 1;
      if (span.insert(std::move(v))) {
        generators_.push_back(ti);
        weights_.push_back(m);
      }
    }
    if (span.rank() != degm.size())
      throw std::runtime_error("alphabet: generator selection cannot span degree " +
                               std::to_string(m));
  }

  words_.resize(n + 1);
  word_pos_.resize(n + 1);
  words_[0] = {Word{}};
  word_pos_[0][Word{}] = 0;
  for (int m = 1; m <= n; ++m) {
    Word acc;
    gen_words(K(), weights_, m, acc, words_[m], 1);
    for (std::size_t i = 0; i < words_[m].size(); ++i)
      word_pos_[m][words_[m][i]] = static_cast<int>(i);
  }

  // isomorphism blocks: square and invertible or the construction is invalid
  phi_.resize(n + 1);
  phi_inv_.resize(n + 1);
  phi_d_.resize(n + 1);
  phi_inv_d_.resize(n + 1);
  for (int m = 1; m <= n; ++m) {
    const auto& degm = basis_->forests_of_degree(m);
    const auto& words = words_[m];
    if (words.size() != degm.size())
      throw std::runtime_error("alphabet: degree " + std::to_string(m) + " block not square (" +
                               std::to_string(words.size()) + " words, " +
                               std::to_string(degm.size()) + " forests)");
    Matrix<Rational> M(degm.size(), words.size());
    for (std::size_t j = 0; j < words.size(); ++j) {
      auto img = word_image(words[j]);
      for (std::size_t i = 0; i < degm.size(); ++i) M(i, j) = img[degm[i]];
    }
    phi_[m] = M;
    try {
      phi_inv_[m] = M.inverse();
    } catch (const std::exception&) {
      throw std::runtime_error("alphabet: degree " + std::to_string(m) +
                               " isomorphism block is singular");
    }
    phi_d_[m] = to_double_matrix(phi_[m]);
    phi_inv_d_[m] = to_double_matrix(phi_inv_[m]);
  }

  // Lyndon data per degree
  lyndon_.resize(n + 1);
  for (const auto& w : all_lyndon(K(), n)) {
    int deg = word_degree(w);
    if (deg <= n) lyndon_[deg].push_back(w);
  }
  lyn_exp_.resize(n + 1);
  lyn_exp_d_.resize(n + 1);
  lyn_pivot_.resize(n + 1);
  lyn_solve_.resize(n + 1);
  lyn_solve_d_.resize(n + 1);
  for (int m = 1; m <= n; ++m) {
    const auto& lw = lyndon_[m];
    const auto& words = words_[m];
    if (lw.empty()) continue;
    Matrix<Rational> B(lw.size(), words.size());
    for (std::size_t i = 0; i < lw.size(); ++i)
      for (const auto& [w, c] : bracket_expansion(lw[i])) B(i, word_pos_[m].at(w)) = c;
    lyn_exp_[m] = B;
    lyn_exp_d_[m] = to_double_matrix(B);

    // pivot columns by exact elimination; rows are independent by construction
    Matrix<Rational> E = B;
    std::vector<std::size_t>& piv = lyn_pivot_[m];
    for (std::size_t i = 0; i < E.rows(); ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        Rational f = E(i, piv[k]);
        if (f == 0) continue;
        for (std::size_t j = 0; j < E.cols(); ++j) E(i, j) -= f * E(k, j);
      }
      std::size_t p = 0;
      while (p < E.cols() && E(i, p) == 0) ++p;
      if (p == E.cols()) throw std::logic_error("alphabet: dependent Lyndon expansions");
      Rational d0 = E(i, p);
      for (std::size_t j = 0; j < E.cols(); ++j) E(i, j) /= d0;
      // keep earlier rows reduced at the new pivot
      for (std::size_t k = 0; k < i; ++k) {
        Rational f = E(k, p);
        if (f == 0) continue;
        for (std::size_t j = 0; j < E.cols(); ++j) E(k, j) -= f * E(i, j);
      }
      piv.push_back(p);
    }
    Matrix<Rational> PT(lw.size(), lw.size());
    for (std::size_t i = 0; i < lw.size(); ++i)
      for (std::size_t l = 0; l < lw.size(); ++l) PT(l, i) = B(i, piv[l]);
    lyn_solve_[m] = PT.inverse();
    lyn_solve_d_[m] = to_double_matrix(lyn_solve_[m]);
  }
}

int Alphabet::word_position(const Word& w) const {
  int m = word_degree(w);
  auto it = word_pos_.at(m).find(w);
  if (it == word_pos_.at(m).end()) throw std::invalid_argument("word_position: unknown word");
  return it->second;
}

namespace {

template <class S>
std::vector<S> lie_solve_impl(const Matrix<S>& B, const Matrix<S>& solver,
                              const std::vector<std::size_t>& piv, const std::vector<S>& t,
                              std::vector<S>* residual) {
  if (t.size() != B.cols()) throw std::invalid_argument("lie_solve: vector length mismatch");
  std::vector<S> tj(piv.size());
  for (std::size_t l = 0; l < piv.size(); ++l) tj[l] = t[piv[l]];
  std::vector<S> c = solver.mul(tj);
  if (residual) {
    residual->assign(t.size(), S(0));
    for (std::size_t j = 0; j < t.size(); ++j) {
      S acc(0);
      for (std::size_t i = 0; i < B.rows(); ++i)
        if (!(B(i, j) == S(0))) acc += c[i] * B(i, j);
      (*residual)[j] = acc - t[j];
    }
  }
  return c;
}

}  // namespace

std::vector<Rational> Alphabet::lie_solve(int m, const std::vector<Rational>& t,
                                          std::vector<Rational>* residual) const {
  return lie_solve_impl(lyn_exp_.at(m), lyn_solve_.at(m), lyn_pivot_.at(m), t, residual);
}

std::vector<double> Alphabet::lie_solve(int m, const std::vector<double>& t,
                                        std::vector<double>* residual) const {
  return lie_solve_impl(lyn_exp_d_.at(m), lyn_solve_d_.at(m), lyn_pivot_.at(m), t, residual);
}

}  // namespace brp
