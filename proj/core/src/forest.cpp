#include "brp/forest.hpp"

#include <algorithm>
#include <stdexcept>

namespace brp {

namespace {

// Labels are encoded as single bytes; enough for any workable alphabet.
char label_byte(int label) {
  if (label < 1 || label > 255) throw std::invalid_argument("tree label out of range 1..255");
  return static_cast<char>(static_cast<unsigned char>(label));
}

}  // namespace

Tree::Tree(int label, std::vector<Tree> children) : label_(label), children_(std::move(children)) {
  label_byte(label);
  degree_ = 1;
  for (const auto& c : children_) {
    if (!c.valid()) throw std::invalid_argument("invalid child tree");
    degree_ += c.degree();
  }
  std::sort(children_.begin(), children_.end(),
            [](const Tree& a, const Tree& b) { return a.key() < b.key(); });
  key_.reserve(2 + children_.size() * 4);
  key_.push_back(label_byte(label));
  key_.push_back('(');
  for (const auto& c : children_) key_ += c.key();
  key_.push_back(')');
}

Tree graft(const Forest& children, int label) {
  return Tree(label, children.expand());
}

Tree graft(const std::vector<Tree>& children, int label) { return Tree(label, children); }

std::string canonical_key(const Tree& t) { return t.key(); }
std::string canonical_key(const Forest& f) { return f.key(); }

Forest::Forest(const Tree& t) : items_{{t, 1}} {
  if (!t.valid()) throw std::invalid_argument("invalid tree");
  rebuild();
}

Forest::Forest(const std::vector<Tree>& trees) {
  for (const auto& t : trees) {
    if (!t.valid()) throw std::invalid_argument("invalid tree");
    items_.emplace_back(t, 1);
  }
  rebuild();
}

Forest::Forest(std::vector<std::pair<Tree, int>> items) : items_(std::move(items)) {
  for (const auto& [t, n] : items_) {
    if (!t.valid()) throw std::invalid_argument("invalid tree");
    if (n <= 0) throw std::invalid_argument("non-positive multiplicity");
  }
  rebuild();
}

void Forest::rebuild() {
  std::sort(items_.begin(), items_.end(),
            [](const auto& a, const auto& b) { return a.first.key() < b.first.key(); });
  // merge equal trees
  std::vector<std::pair<Tree, int>> merged;
  for (auto& it : items_) {
    if (!merged.empty() && merged.back().first == it.first)
      merged.back().second += it.second;
    else
      merged.push_back(it);
  }
  items_ = std::move(merged);
  degree_ = 0;
  key_.clear();
  for (const auto& [t, n] : items_) {
    degree_ += t.degree() * n;
    for (int i = 0; i < n; ++i) key_ += t.key();
  }
}

int Forest::tree_count() const {
  int c = 0;
  for (const auto& [t, n] : items_) c += n;
  return c;
}

std::vector<Tree> Forest::expand() const {
  std::vector<Tree> out;
  out.reserve(static_cast<std::size_t>(tree_count()));
  for (const auto& [t, n] : items_)
    for (int i = 0; i < n; ++i) out.push_back(t);
  return out;
}

Forest Forest::disjoint_union(const Forest& o) const {
  auto items = items_;
  items.insert(items.end(), o.items_.begin(), o.items_.end());
  return Forest(std::move(items));
}

namespace {

void check_limit(std::size_t count, std::size_t limit) {
  if (count > limit) throw std::runtime_error("enumeration limit exceeded");
}

// Forests of total degree exactly n drawn from `trees` (sorted by (degree,key)),
// using trees[idx..] only.
void forests_of_degree(const std::vector<Tree>& trees, int n, std::size_t idx,
                       std::vector<std::pair<Tree, int>>& acc, std::vector<Forest>& out,
                       std::size_t limit) {
  if (n == 0) {
    out.push_back(Forest(acc));
    check_limit(out.size(), limit);
    return;
  }
  for (std::size_t i = idx; i < trees.size(); ++i) {
    int dg = trees[i].degree();
    if (dg > n) break;  // trees sorted by degree
    for (int mult = 1; mult * dg <= n; ++mult) {
      acc.emplace_back(trees[i], mult);
      forests_of_degree(trees, n - mult * dg, i + 1, acc, out, limit);
      acc.pop_back();
    }
  }
}

}  // namespace

std::vector<Tree> enumerate_trees(int N, int d, std::size_t limit) {
  if (N < 0 || d < 1) throw std::invalid_argument("enumerate_trees: bad arguments");
  label_byte(d);
  std::vector<Tree> all;  // degrees 1..N, sorted by (degree, key)
  for (int n = 1; n <= N; ++n) {
    std::vector<Tree> level;
    if (n == 1) {
      for (int a = 1; a <= d; ++a) level.push_back(leaf(a));
    } else {
      // a tree of degree n is a root label over a child forest of degree n-1
      std::vector<Forest> child_forests;
      std::vector<std::pair<Tree, int>> acc;
      forests_of_degree(all, n - 1, 0, acc, child_forests, limit);
      for (const auto& f : child_forests)
        for (int a = 1; a <= d; ++a) {
          level.push_back(graft(f, a));
          check_limit(all.size() + level.size(), limit);
        }
    }
    std::sort(level.begin(), level.end());
    all.insert(all.end(), level.begin(), level.end());
    check_limit(all.size(), limit);
  }
  return all;
}

std::vector<Forest> enumerate_forests(int N, int d, std::size_t limit) {
  if (N < 0 || d < 1) throw std::invalid_argument("enumerate_forests: bad arguments");
  auto trees = enumerate_trees(N, d, limit);
  std::vector<Forest> all;
  for (int n = 1; n <= N; ++n) {
    std::vector<Forest> level;
    std::vector<std::pair<Tree, int>> acc;
    forests_of_degree(trees, n, 0, acc, level, limit);
    std::sort(level.begin(), level.end());
    all.insert(all.end(), level.begin(), level.end());
    check_limit(all.size(), limit);
  }
  return all;
}

namespace {
std::uint64_t factorial_u64(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}
std::uint64_t pow_u64(std::uint64_t b, int n) {
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) r *= b;
  return r;
}
}  // namespace

std::uint64_t symmetry_factor(const Forest& f) {
  std::uint64_t s = 1;
  for (const auto& [t, n] : f.items()) s *= factorial_u64(n) * pow_u64(symmetry_factor(t), n);
  return s;
}

std::uint64_t symmetry_factor(const Tree& t) {
  return symmetry_factor(Forest(t.children()));
}

std::uint64_t tree_factorial(const Tree& t) {
  std::uint64_t f = static_cast<std::uint64_t>(t.degree());
  for (const auto& c : t.children()) f *= tree_factorial(c);
  return f;
}

}  // namespace brp
