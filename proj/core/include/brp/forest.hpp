#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace brp {

// Rooted trees with vertex labels in 1..d, kept in a canonical form:
// children are sorted by their canonical encodings, so structural equality
// is string equality on keys. A Forest is a multiset of trees stored as
// (tree, multiplicity) pairs sorted by key.

class Tree {
 public:
  Tree() = default;  // invalid sentinel, label 0
  Tree(int label, std::vector<Tree> children);

  int label() const { return label_; }
  const std::vector<Tree>& children() const { return children_; }
  int degree() const { return degree_; }    // number of vertices
  const std::string& key() const { return key_; }
  bool valid() const { return label_ >= 1; }

  bool operator==(const Tree& o) const { return key_ == o.key_; }
  bool operator!=(const Tree& o) const { return key_ != o.key_; }
  // canonical order: degree first, then encoding
  bool operator<(const Tree& o) const {
    if (degree_ != o.degree_) return degree_ < o.degree_;
    return key_ < o.key_;
  }

 private:
  int label_ = 0;
  int degree_ = 0;
  std::vector<Tree> children_;
  std::string key_;
};

inline Tree leaf(int label) { return Tree(label, {}); }

class Forest {
 public:
  Forest() = default;  // empty forest (unit)
  explicit Forest(const Tree& t);
  explicit Forest(const std::vector<Tree>& trees);
  explicit Forest(std::vector<std::pair<Tree, int>> items);

  const std::vector<std::pair<Tree, int>>& items() const { return items_; }
  bool empty() const { return items_.empty(); }
  int degree() const { return degree_; }
  int tree_count() const;  // number of trees counted with multiplicity
  const std::string& key() const { return key_; }
  std::vector<Tree> expand() const;  // trees repeated by multiplicity

  Forest disjoint_union(const Forest& o) const;

  bool operator==(const Forest& o) const { return key_ == o.key_; }
  bool operator!=(const Forest& o) const { return key_ != o.key_; }
  bool operator<(const Forest& o) const {
    if (degree_ != o.degree_) return degree_ < o.degree_;
    return key_ < o.key_;
  }

 private:
  void rebuild();
  std::vector<std::pair<Tree, int>> items_;
  int degree_ = 0;
  std::string key_;
};

// Attach a forest of children under a new root with the given label.
Tree graft(const Forest& children, int label);
Tree graft(const std::vector<Tree>& children, int label);

// Canonical byte encodings; equal objects have equal keys and vice versa.
std::string canonical_key(const Tree& t);
std::string canonical_key(const Forest& f);

// All labeled trees (resp. forests) of degree 1..N with labels in 1..d,
// sorted by (degree, key). Throws if the count would exceed `limit`.
std::vector<Tree> enumerate_trees(int N, int d, std::size_t limit = 1000000);
std::vector<Forest> enumerate_forests(int N, int d, std::size_t limit = 1000000);

// sigma(single vertex) = 1; for a forest t1^n1...tk^nk with distinct ti,
// sigma = prod ni! * sigma(ti)^ni; a tree has the sigma of its child forest.
std::uint64_t symmetry_factor(const Tree& t);
std::uint64_t symmetry_factor(const Forest& f);

// Product over vertices of (1 + number of descendants), the usual
// B-series density; used for lifts of linear segments.
std::uint64_t tree_factorial(const Tree& t);

}  // namespace brp
