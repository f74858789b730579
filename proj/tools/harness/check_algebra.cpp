#include "harness/check_algebra.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "brp/ck_hopf.hpp"
#include "brp/forest.hpp"
#include "brp/rational.hpp"
#include "brp/rng.hpp"
#include "harness/format.hpp"

namespace brp::harness {
namespace {

using Table = std::vector<std::vector<TensorTerm>>;
using PairMap = std::map<std::pair<int, int>, std::int64_t>;
using TripleMap = std::map<std::tuple<int, int, int>, std::int64_t>;

template <class M>
void drop_zeros(M& m) {
  for (auto it = m.begin(); it != m.end();)
    it = (it->second == 0) ? m.erase(it) : std::next(it);
}

PairMap as_map(const std::vector<TensorTerm>& terms) {
  PairMap m;
  for (const auto& t : terms) m[{t.left, t.right}] += t.coeff;
  drop_zeros(m);
  return m;
}

int union_index(const HopfBasis& basis, int fi, int gi) {
  int u = basis.forest_index(basis.forests()[fi].disjoint_union(basis.forests()[gi]));
  if (u < 0) throw std::logic_error("disjoint union left the truncation");
  return u;
}

Character<Rational> random_character(const HopfBasis& basis,
                                     const std::shared_ptr<const HopfBasis>& handle,
                                     CounterRng& rng) {
  Character<Rational> a(handle);
  for (std::size_t ti = 0; ti < basis.trees().size(); ++ti)
    a.tree_value(static_cast<int>(ti)) =
        Rational(rng.uniform_int(-6, 6), rng.uniform_int(1, 4));
  return a;
}

struct Runner {
  const std::shared_ptr<const HopfBasis> handle;
  const HopfBasis& basis;
  Table cut_forest;  // local copy, optionally corrupted by the injection
  Table split;
  AlgebraCheckReport report;

  explicit Runner(std::shared_ptr<const HopfBasis> h) : handle(std::move(h)), basis(*handle) {
    cut_forest.reserve(basis.forests().size());
    split.reserve(basis.forests().size());
    for (std::size_t fi = 0; fi < basis.forests().size(); ++fi) {
      cut_forest.push_back(basis.cut_coproduct_forest(static_cast<int>(fi)));
      split.push_back(basis.split_coproduct(static_cast<int>(fi)));
    }
  }

  void inject_sign_flip() {
    if (basis.N() < 2) throw std::invalid_argument("injection needs N >= 2");
    const Tree ladder(1, {leaf(1)});
    int fi = basis.tree_to_forest(basis.tree_index(ladder));
    bool done = false;
    for (auto& term : cut_forest[fi])
      if (term.left != 0 && term.right != 0) {
        term.coeff = -term.coeff;
        done = true;
      }
    if (!done) throw std::logic_error("ladder has no proper cut term");
  }

  SuiteResult& begin(const std::string& name) {
    report.suites.push_back(SuiteResult{name, true, 0, ""});
    return report.suites.back();
  }

  static void fail(SuiteResult& s, const std::string& witness) {
    if (s.pass) s.counterexample = witness;
    s.pass = false;
  }

  void counit() {
    auto& s = begin("counit");
    for (std::size_t fi = 0; fi < cut_forest.size(); ++fi) {
      for (int side = 0; side < 2; ++side) {
        std::map<int, std::int64_t> acc;
        for (const auto& t : cut_forest[fi])
          if ((side == 0 ? t.left : t.right) == 0) acc[side == 0 ? t.right : t.left] += t.coeff;
        drop_zeros(acc);
        ++s.checks;
        if (acc != std::map<int, std::int64_t>{{static_cast<int>(fi), 1}})
          fail(s, format_forest(basis.forests()[fi]));
      }
      // split coproduct has the same counit
      for (int side = 0; side < 2; ++side) {
        std::map<int, std::int64_t> acc;
        for (const auto& t : split[fi])
          if ((side == 0 ? t.left : t.right) == 0) acc[side == 0 ? t.right : t.left] += t.coeff;
        drop_zeros(acc);
        ++s.checks;
        if (acc != std::map<int, std::int64_t>{{static_cast<int>(fi), 1}})
          fail(s, format_forest(basis.forests()[fi]));
      }
    }
  }

  // The forest table must be the multiplicative extension of the tree table;
  // on singleton forests the two must agree term by term.
  void table_consistency() {
    auto& s = begin("tree-forest consistency");
    for (std::size_t ti = 0; ti < basis.trees().size(); ++ti) {
      ++s.checks;
      if (as_map(basis.cut_coproduct_tree(static_cast<int>(ti))) !=
          as_map(cut_forest[basis.tree_to_forest(static_cast<int>(ti))]))
        fail(s, format_tree(basis.trees()[static_cast<int>(ti)]));
    }
  }

  void coassociativity(const Table& table, const std::string& name) {
    auto& s = begin(name);
    for (std::size_t fi = 0; fi < table.size(); ++fi) {
      TripleMap lhs, rhs;
      for (const auto& t : table[fi]) {
        for (const auto& u : table[t.left]) lhs[{u.left, u.right, t.right}] += t.coeff * u.coeff;
        for (const auto& u : table[t.right]) rhs[{t.left, u.left, u.right}] += t.coeff * u.coeff;
      }
      drop_zeros(lhs);
      drop_zeros(rhs);
      ++s.checks;
      if (lhs != rhs) fail(s, format_forest(basis.forests()[fi]));
    }
  }

  void algebra_morphism(const Table& table, const std::string& name) {
    auto& s = begin(name);
    const int N = basis.N();
    for (std::size_t fi = 1; fi < table.size(); ++fi)
      for (std::size_t gi = 1; gi < table.size(); ++gi) {
        if (basis.forest_degree(static_cast<int>(fi)) +
                basis.forest_degree(static_cast<int>(gi)) >
            N)
          continue;
        int u = union_index(basis, static_cast<int>(fi), static_cast<int>(gi));
        PairMap rhs;
        for (const auto& a : table[fi])
          for (const auto& b : table[gi])
            rhs[{union_index(basis, a.left, b.left), union_index(basis, a.right, b.right)}] +=
                a.coeff * b.coeff;
        drop_zeros(rhs);
        ++s.checks;
        if (as_map(table[u]) != rhs)
          fail(s, format_forest(basis.forests()[fi]) + " * " + format_forest(basis.forests()[gi]));
      }
  }

  void character_closure(const std::vector<Character<Rational>>& chars) {
    auto& s = begin("character closure");
    for (std::size_t k = 0; k + 1 < chars.size(); k += 2) {
      const auto& a = chars[k];
      const auto& b = chars[k + 1];
      auto c = char_product(a, b);
      // library product of tree values, extended multiplicatively, against the
      // raw convolution through the full forest coproduct
      for (std::size_t fi = 0; fi < cut_forest.size(); ++fi) {
        Rational direct(0);
        for (const auto& t : cut_forest[fi])
          direct += Rational(t.coeff) * a.forest_value(t.left) * b.forest_value(t.right);
        ++s.checks;
        if (direct != c.forest_value(static_cast<int>(fi)))
          fail(s, format_forest(basis.forests()[fi]));
      }
      auto inv = char_inverse(a);
      auto unit = char_product(a, inv);
      for (std::size_t ti = 0; ti < basis.trees().size(); ++ti) {
        ++s.checks;
        if (unit.tree_value(static_cast<int>(ti)) != 0)
          fail(s, format_tree(basis.trees()[ti]));
      }
    }
  }

  void antipode(const std::vector<Character<Rational>>& chars) {
    auto& s = begin("antipode");
    const std::size_t nt = basis.trees().size();
    const std::size_t nf = basis.forests().size();
    // S(t) = -t - sum over proper cuts of S(pruned) * root, degree by degree
    std::vector<std::map<int, std::int64_t>> s_tree(nt), s_forest(nf);
    s_forest[0] = {{0, 1}};
    auto conv = [&](const std::map<int, std::int64_t>& a, const std::map<int, std::int64_t>& b) {
      std::map<int, std::int64_t> out;
      for (const auto& [fa, ca] : a)
        for (const auto& [fb, cb] : b) out[union_index(basis, fa, fb)] += ca * cb;
      drop_zeros(out);
      return out;
    };
    std::vector<char> forest_done(nf, 0);
    forest_done[0] = 1;
    auto forest_poly = [&](int fi) -> const std::map<int, std::int64_t>& {
      if (!forest_done[fi]) {
        std::map<int, std::int64_t> acc = {{0, 1}};
        for (const auto& [ti, mult] : basis.forest_items(fi))
          for (int r = 0; r < mult; ++r) acc = conv(acc, s_tree[ti]);
        s_forest[fi] = std::move(acc);
        forest_done[fi] = 1;
      }
      return s_forest[fi];
    };
    for (int deg = 1; deg <= basis.N(); ++deg)
      for (std::size_t ti = 0; ti < nt; ++ti) {
        if (basis.trees()[ti].degree() != deg) continue;
        std::map<int, std::int64_t> acc;
        acc[basis.tree_to_forest(static_cast<int>(ti))] = -1;
        for (const auto& t : basis.cut_coproduct_tree(static_cast<int>(ti))) {
          if (t.left == 0 || t.right == 0) continue;
          for (const auto& [f0, c0] : forest_poly(t.left))
            acc[union_index(basis, f0, t.right)] -= t.coeff * c0;
        }
        drop_zeros(acc);
        s_tree[ti] = std::move(acc);
      }
    // m(S x id)Delta = m(id x S)Delta = unit * counit, on every forest
    for (std::size_t fi = 0; fi < nf; ++fi) {
      std::map<int, std::int64_t> lhs, rhs;
      for (const auto& t : cut_forest[fi]) {
        for (const auto& [f0, c0] : forest_poly(t.left))
          lhs[union_index(basis, f0, t.right)] += t.coeff * c0;
        for (const auto& [f0, c0] : forest_poly(t.right))
          rhs[union_index(basis, t.left, f0)] += t.coeff * c0;
      }
      drop_zeros(lhs);
      drop_zeros(rhs);
      std::map<int, std::int64_t> expect;
      if (fi == 0) expect[0] = 1;
      s.checks += 2;
      if (lhs != expect || rhs != expect) fail(s, format_forest(basis.forests()[fi]));
    }
    // composing a character with S gives its convolution inverse
    for (const auto& a : chars) {
      auto inv = char_inverse(a);
      for (std::size_t ti = 0; ti < nt; ++ti) {
        Rational v(0);
        for (const auto& [f0, c0] : s_tree[ti]) v += Rational(c0) * a.forest_value(f0);
        ++s.checks;
        if (v != inv.tree_value(static_cast<int>(ti))) fail(s, format_tree(basis.trees()[ti]));
      }
    }
  }

  void grafting() {
    auto& s = begin("grafting product");
    const std::size_t nf = basis.forests().size();
    const int N = basis.N();
    for (std::size_t fi = 0; fi < nf; ++fi) {
      auto left = basis.graft_product(0, static_cast<int>(fi));
      auto right = basis.graft_product(static_cast<int>(fi), 0);
      s.checks += 2;
      auto is_unit_row = [&](const std::vector<std::pair<int, std::int64_t>>& row) {
        return row.size() == 1 && row[0].first == static_cast<int>(fi) && row[0].second == 1;
      };
      if (!is_unit_row(left) || !is_unit_row(right)) fail(s, format_forest(basis.forests()[fi]));
    }
    for (std::size_t fi = 1; fi < nf; ++fi)
      for (std::size_t gi = 1; gi < nf; ++gi) {
        int dfg = basis.forest_degree(static_cast<int>(fi)) +
                  basis.forest_degree(static_cast<int>(gi));
        if (dfg >= N) continue;
        for (std::size_t hi = 1; hi < nf; ++hi) {
          if (dfg + basis.forest_degree(static_cast<int>(hi)) > N) continue;
          std::map<int, std::int64_t> lhs, rhs;
          for (const auto& [k, c] : basis.graft_product(static_cast<int>(fi), static_cast<int>(gi)))
            for (const auto& [m, c2] : basis.graft_product(k, static_cast<int>(hi)))
              lhs[m] += c * c2;
          for (const auto& [k, c] : basis.graft_product(static_cast<int>(gi), static_cast<int>(hi)))
            for (const auto& [m, c2] : basis.graft_product(static_cast<int>(fi), k))
              rhs[m] += c * c2;
          drop_zeros(lhs);
          drop_zeros(rhs);
          ++s.checks;
          if (lhs != rhs)
            fail(s, format_forest(basis.forests()[fi]) + " * " +
                        format_forest(basis.forests()[gi]) + " * " +
                        format_forest(basis.forests()[hi]));
        }
      }
  }

  void symmetry_factors() {
    auto& s = begin("symmetry factors");
    for (std::size_t fi = 0; fi < basis.forests().size(); ++fi) {
      std::uint64_t expect = 1;
      for (const auto& [ti, mult] : basis.forest_items(static_cast<int>(fi))) {
        for (int r = 2; r <= mult; ++r) expect *= static_cast<std::uint64_t>(r);
        for (int r = 0; r < mult; ++r) expect *= basis.sigma_tree(ti);
      }
      ++s.checks;
      if (expect != basis.sigma_forest(static_cast<int>(fi)))
        fail(s, format_forest(basis.forests()[fi]));
    }
    for (std::size_t ti = 0; ti < basis.trees().size(); ++ti) {
      const Tree& t = basis.trees()[ti];
      int cfi = basis.forest_index(Forest(t.children()));
      ++s.checks;
      if (cfi < 0 || basis.sigma_tree(static_cast<int>(ti)) != basis.sigma_forest(cfi))
        fail(s, format_tree(t));
    }
  }
};

}  // namespace

AlgebraCheckReport check_algebra(const AlgebraCheckOptions& opt) {
  if (opt.N < 1 || opt.d < 1) throw std::invalid_argument("check_algebra: need N >= 1, d >= 1");
  Runner run(HopfBasis::get(opt.N, opt.d));
  if (opt.inject_cut_sign_flip) run.inject_sign_flip();

  std::vector<Character<Rational>> chars;
  CounterRng rng(opt.seed, 0);
  for (int k = 0; k < 2 * std::max(1, opt.random_characters); ++k)
    chars.push_back(random_character(run.basis, run.handle, rng));

  run.counit();
  run.table_consistency();
  run.coassociativity(run.cut_forest, "cut coassociativity");
  run.coassociativity(run.split, "split coassociativity");
  run.algebra_morphism(run.cut_forest, "cut morphism");
  run.algebra_morphism(run.split, "split morphism");
  run.character_closure(chars);
  run.antipode(chars);
  run.grafting();
  run.symmetry_factors();

  auto& report = run.report;
  for (const auto& s : report.suites) {
    report.checks += s.checks;
    if (!s.pass && report.pass) {
      report.pass = false;
      report.counterexample = s.counterexample;
    }
  }
  return run.report;
}

}  // namespace brp::harness
