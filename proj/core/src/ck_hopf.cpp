#include "brp/ck_hopf.hpp"

#include <algorithm>
#include <functional>

namespace brp {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

// vertex addresses inside one tree: sequences of child positions
void collect_vertex_paths(const Tree& t, std::vector<int>& prefix,
                          std::vector<std::vector<int>>& out) {
  out.push_back(prefix);
  for (int i = 0; i < static_cast<int>(t.children().size()); ++i) {
    prefix.push_back(i);
    collect_vertex_paths(t.children()[i], prefix, out);
    prefix.pop_back();
  }
}

Tree attach_at(const Tree& t, std::vector<int>& prefix,
               const std::map<std::vector<int>, std::vector<Tree>>& atts) {
  std::vector<Tree> kids;
  for (int i = 0; i < static_cast<int>(t.children().size()); ++i) {
    prefix.push_back(i);
    kids.push_back(attach_at(t.children()[i], prefix, atts));
    prefix.pop_back();
  }
  auto it = atts.find(prefix);
  if (it != atts.end())
    for (const auto& extra : it->second) kids.push_back(extra);
  return Tree(t.label(), std::move(kids));
}

std::vector<TensorTerm> flatten(const std::map<std::pair<int, int>, std::int64_t>& acc) {
  std::vector<TensorTerm> out;
  out.reserve(acc.size());
  for (const auto& [lr, c] : acc)
    if (c != 0) out.push_back({lr.first, lr.second, c});
  return out;
}

}  // namespace

std::shared_ptr<const HopfBasis> HopfBasis::get(int N, int d) {
  static std::mutex reg_mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const HopfBasis>> registry;
  std::lock_guard<std::mutex> lock(reg_mu);
  auto& slot = registry[{N, d}];
  if (!slot) slot = std::shared_ptr<const HopfBasis>(new HopfBasis(N, d));
  return slot;
}

HopfBasis::HopfBasis(int N, int d) : N_(N), d_(d) {
  if (N < 1) throw std::invalid_argument("truncation degree must be >= 1");
  trees_ = enumerate_trees(N, d);
  forests_.push_back(Forest{});
  {
    auto fs = enumerate_forests(N, d);
    forests_.insert(forests_.end(), fs.begin(), fs.end());
  }
  for (std::size_t i = 0; i < trees_.size(); ++i) tree_by_key_[trees_[i].key()] = static_cast<int>(i);
  for (std::size_t i = 0; i < forests_.size(); ++i)
    forest_by_key_[forests_[i].key()] = static_cast<int>(i);

  forest_degree_.resize(forests_.size());
  forest_items_.resize(forests_.size());
  sigma_forest_.resize(forests_.size());
  by_degree_.assign(N + 1, {});
  for (std::size_t i = 0; i < forests_.size(); ++i) {
    forest_degree_[i] = forests_[i].degree();
    by_degree_[forest_degree_[i]].push_back(static_cast<int>(i));
    sigma_forest_[i] = symmetry_factor(forests_[i]);
    for (const auto& [t, mult] : forests_[i].items())
      forest_items_[i].push_back({tree_by_key_.at(t.key()), mult});
  }
  tree_to_forest_.resize(trees_.size());
  sigma_tree_.resize(trees_.size());
  treefact_.resize(trees_.size());
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    tree_to_forest_[i] = forest_by_key_.at(Forest(trees_[i]).key());
    sigma_tree_[i] = symmetry_factor(trees_[i]);
    treefact_[i] = brp::tree_factorial(trees_[i]);
  }

  // admissible-cut coproducts, filled in degree order: a tree of degree n
  // needs its child forest (degree n-1), a forest of degree n needs the
  // trees it contains (degree <= n)
  cut_tree_.resize(trees_.size());
  cut_forest_.resize(forests_.size());
  cut_forest_[0] = {{0, 0, 1}};
  for (int n = 1; n <= N; ++n) {
    for (std::size_t ti = 0; ti < trees_.size(); ++ti) {
      const Tree& t = trees_[ti];
      if (t.degree() != n) continue;
      int cfi = forest_by_key_.at(Forest(t.children()).key());
      std::map<std::pair<int, int>, std::int64_t> acc;
      acc[{tree_to_forest_[ti], 0}] += 1;
      for (const auto& term : cut_forest_[cfi]) {
        Tree grown = graft(forests_[term.right], t.label());
        acc[{term.left, forest_by_key_.at(Forest(grown).key())}] += term.coeff;
      }
      cut_tree_[ti] = flatten(acc);
    }
    for (int fi : by_degree_[n]) {
      const auto& items = forest_items_[fi];
      if (items.size() == 1 && items[0].second == 1) {
        cut_forest_[fi] = cut_tree_[items[0].first];
        continue;
      }
      // split off one copy of the first tree and convolve
      int ti0 = items[0].first;
      std::vector<std::pair<Tree, int>> rest_items;
      for (const auto& [tj, m] : forests_[fi].items()) rest_items.push_back({tj, m});
      if (--rest_items[0].second == 0) rest_items.erase(rest_items.begin());
      int rest = forest_by_key_.at(Forest(std::move(rest_items)).key());
      std::map<std::pair<int, int>, std::int64_t> acc;
      for (const auto& a : cut_tree_[ti0])
        for (const auto& b : cut_forest_[rest]) {
          int L = forest_by_key_.at(forests_[a.left].disjoint_union(forests_[b.left]).key());
          int R = forest_by_key_.at(forests_[a.right].disjoint_union(forests_[b.right]).key());
          acc[{L, R}] += a.coeff * b.coeff;
        }
      cut_forest_[fi] = flatten(acc);
    }
  }

  // subforest splits with multiset binomial weights
  split_.resize(forests_.size());
  split_[0] = {{0, 0, 1}};
  for (std::size_t fi = 1; fi < forests_.size(); ++fi) {
    const auto& items = forests_[fi].items();
    std::vector<int> take(items.size(), 0);
    std::vector<TensorTerm> terms;
    for (;;) {
      std::vector<std::pair<Tree, int>> left_items, right_items;
      std::int64_t coeff = 1;
      for (std::size_t k = 0; k < items.size(); ++k) {
        coeff *= static_cast<std::int64_t>(binomial(items[k].second, take[k]));
        if (take[k] > 0) left_items.push_back({items[k].first, take[k]});
        if (take[k] < items[k].second)
          right_items.push_back({items[k].first, items[k].second - take[k]});
      }
      terms.push_back({forest_by_key_.at(Forest(std::move(left_items)).key()),
                       forest_by_key_.at(Forest(std::move(right_items)).key()), coeff});
      std::size_t k = 0;
      while (k < take.size() && take[k] == items[k].second) take[k++] = 0;
      if (k == take.size()) break;
      ++take[k];
    }
    split_[fi] = std::move(terms);
  }
}

int HopfBasis::tree_index(const Tree& t) const {
  auto it = tree_by_key_.find(t.key());
  if (it == tree_by_key_.end()) throw std::invalid_argument("tree outside basis: " + t.key());
  return it->second;
}

int HopfBasis::forest_index(const Forest& f) const {
  auto it = forest_by_key_.find(f.key());
  return it == forest_by_key_.end() ? -1 : it->second;
}

const std::vector<std::pair<int, std::int64_t>>& HopfBasis::graft_product(int fi, int gi) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = graft_cache_.find({fi, gi});
  if (it != graft_cache_.end()) return it->second;
  if (forest_degree_[fi] + forest_degree_[gi] > N_)
    throw std::invalid_argument("grafting product exceeds truncation degree");

  const std::vector<Tree> atts = forests_[fi].expand();
  const std::vector<Tree> hosts = forests_[gi].expand();
  struct Target {
    int host;  // -1 means the ground
    std::vector<int> path;
  };
  std::vector<Target> targets;
  targets.push_back({-1, {}});
  for (std::size_t h = 0; h < hosts.size(); ++h) {
    std::vector<std::vector<int>> paths;
    std::vector<int> prefix;
    collect_vertex_paths(hosts[h], prefix, paths);
    for (auto& p : paths) targets.push_back({static_cast<int>(h), std::move(p)});
  }

  std::map<int, std::int64_t> acc;
  std::vector<std::size_t> choice(atts.size(), 0);
  for (;;) {
    std::vector<std::map<std::vector<int>, std::vector<Tree>>> by_host(hosts.size());
    std::vector<Tree> result;
    for (std::size_t a = 0; a < atts.size(); ++a) {
      const Target& tg = targets[choice[a]];
      if (tg.host < 0)
        result.push_back(atts[a]);
      else
        by_host[tg.host][tg.path].push_back(atts[a]);
    }
    for (std::size_t h = 0; h < hosts.size(); ++h) {
      std::vector<int> prefix;
      result.push_back(attach_at(hosts[h], prefix, by_host[h]));
    }
    acc[forest_by_key_.at(Forest(result).key())] += 1;
    std::size_t a = 0;
    while (a < choice.size() && choice[a] + 1 == targets.size()) choice[a++] = 0;
    if (a == choice.size()) break;
    ++choice[a];
  }

  std::vector<std::pair<int, std::int64_t>> out(acc.begin(), acc.end());
  return graft_cache_.emplace(std::make_pair(fi, gi), std::move(out)).first->second;
}

ForestPoly<Rational> eulerian_idempotent_basis(const std::shared_ptr<const HopfBasis>& basis,
                                               int fi) {
  static std::mutex mu;
  static std::map<std::pair<const HopfBasis*, int>, ForestPoly<Rational>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({basis.get(), fi});
    if (it != cache.end()) return it->second;
  }

  // convolution powers of the augmentation projector J for the splitting
  // coproduct, multiplied with the grafting product
  std::map<std::pair<int, int>, ForestPoly<Rational>> jk;
  std::function<const ForestPoly<Rational>&(int, int)> conv = [&](int f, int k)
      -> const ForestPoly<Rational>& {
    auto it = jk.find({f, k});
    if (it != jk.end()) return it->second;
    ForestPoly<Rational> out(basis);
    if (k == 1) {
      out[f] = 1;
    } else {
      for (const auto& term : basis->split_coproduct(f)) {
        if (basis->forest_degree(term.left) == 0 || basis->forest_degree(term.right) == 0)
          continue;
        const auto& left = conv(term.left, k - 1);
        for (std::size_t j = 0; j < left.coeffs().size(); ++j) {
          if (left.coeffs()[j] == 0) continue;
          Rational c = left.coeffs()[j] * term.coeff;
          for (const auto& [res, mult] :
               basis->graft_product(static_cast<int>(j), term.right))
            out[res] += c * mult;
        }
      }
    }
    return jk.emplace(std::make_pair(f, k), std::move(out)).first->second;
  };

  ForestPoly<Rational> pi1(basis);
  int deg = basis->forest_degree(fi);
  Rational sign(1);
  for (int k = 1; k <= deg; ++k, sign = -sign) {
    const auto& p = conv(fi, k);
    Rational w = sign / k;
    for (std::size_t j = 0; j < p.coeffs().size(); ++j)
      if (!(p.coeffs()[j] == 0)) pi1[static_cast<int>(j)] += w * p.coeffs()[j];
  }

  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_pair(std::make_pair(basis.get(), fi), pi1)).first->second;
}

}  // namespace brp
