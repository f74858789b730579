#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "brp/ck_hopf.hpp"
#include "brp/pl_path.hpp"
#include "brp/rational.hpp"
#include "brp/rough_path.hpp"
#include "brp/vector_field.hpp"
#include "brp/words.hpp"

namespace brp {

using Json = nlohmann::json;

// Scalars: rationals travel as "numerator/denominator" strings so exact-mode
// files survive a round trip; doubles are plain JSON numbers. Reading a
// rational from a JSON number goes through the exact dyadic conversion.
template <class S>
Json scalar_to_json(const S& v);
template <>
inline Json scalar_to_json<Rational>(const Rational& v) {
  return rational_to_string(v);
}
template <>
inline Json scalar_to_json<double>(const double& v) {
  return v;
}

template <class S>
S scalar_from_json(const Json& j);
template <>
inline Rational scalar_from_json<Rational>(const Json& j) {
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) return rational_from_double(j.get<double>());
  throw std::invalid_argument("scalar_from_json: expected number or rational string");
}
template <>
inline double scalar_from_json<double>(const Json& j) {
  if (j.is_string()) return to_double(rational_from_string(j.get<std::string>()));
  if (j.is_number()) return j.get<double>();
  throw std::invalid_argument("scalar_from_json: expected number or rational string");
}

inline Json tree_to_json(const Tree& t) {
  Json children = Json::array();
  for (const auto& c : t.children()) children.push_back(tree_to_json(c));
  return Json{{"label", t.label()}, {"children", std::move(children)}};
}

inline Tree tree_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("label"))
    throw std::invalid_argument("tree_from_json: expected {label, children}");
  std::vector<Tree> children;
  if (j.contains("children"))
    for (const auto& c : j.at("children")) children.push_back(tree_from_json(c));
  return Tree(j.at("label").get<int>(), std::move(children));
}

inline Json forest_to_json(const Forest& f) {
  Json out = Json::array();
  for (const auto& t : f.expand()) out.push_back(tree_to_json(t));
  return out;
}

inline Forest forest_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("forest_from_json: expected a list of trees");
  std::vector<Tree> trees;
  for (const auto& t : j) trees.push_back(tree_from_json(t));
  return Forest(trees);
}

// Nonzero tree values only, in basis order, so equal characters serialize to
// equal bytes.
template <class S>
Json character_to_json(const Character<S>& a) {
  const auto& basis = *a.basis();
  Json values = Json::array();
  for (std::size_t ti = 0; ti < basis.trees().size(); ++ti) {
    if (a.tree_value(static_cast<int>(ti)) == S(0)) continue;
    values.push_back(Json{{"tree", tree_to_json(basis.trees()[ti])},
                          {"value", scalar_to_json<S>(a.tree_value(static_cast<int>(ti)))}});
  }
  return Json{{"N", basis.N()}, {"d", basis.d()}, {"values", std::move(values)}};
}

template <class S>
Character<S> character_from_json(const Json& j) {
  auto basis = HopfBasis::get(j.at("N").get<int>(), j.at("d").get<int>());
  Character<S> out(basis);
  for (const auto& entry : j.at("values")) {
    Tree t = tree_from_json(entry.at("tree"));
    if (t.degree() > basis->N())
      throw std::invalid_argument("character_from_json: tree degree exceeds truncation");
    out.set_value(t, scalar_from_json<S>(entry.at("value")));
  }
  return out;
}

template <class S>
Json path_to_json(const PiecewiseLinearPath<S>& x) {
  Json times = Json::array(), values = Json::array();
  for (const auto& t : x.times()) times.push_back(scalar_to_json<S>(t));
  for (const auto& p : x.points()) {
    Json row = Json::array();
    for (const auto& v : p) row.push_back(scalar_to_json<S>(v));
    values.push_back(std::move(row));
  }
  return Json{{"times", std::move(times)}, {"values", std::move(values)}};
}

template <class S>
PiecewiseLinearPath<S> path_from_json(const Json& j) {
  std::vector<S> times;
  for (const auto& t : j.at("times")) times.push_back(scalar_from_json<S>(t));
  std::vector<std::vector<S>> points;
  for (const auto& row : j.at("values")) {
    std::vector<S> p;
    for (const auto& v : row) p.push_back(scalar_from_json<S>(v));
    points.push_back(std::move(p));
  }
  return PiecewiseLinearPath<S>(std::move(times), std::move(points));
}

// components: d*e polynomials, direction-major (the e component polynomials
// of direction 1 first); box: [lo, hi] per state coordinate.
template <class S>
Json field_to_json(const PolyVectorField<S>& f) {
  Json comps = Json::array();
  for (int a = 0; a < f.d; ++a)
    for (int i = 0; i < f.e; ++i) {
      Json monos = Json::array();
      for (const auto& [exps, coeff] : f.comp[a][i].terms())
        monos.push_back(Json{{"exponents", exps}, {"coeff", scalar_to_json<S>(coeff)}});
      comps.push_back(Json{{"monomials", std::move(monos)}});
    }
  Json box = Json::array();
  for (const auto& [lo, hi] : f.box) box.push_back(Json::array({lo, hi}));
  return Json{{"e", f.e}, {"d", f.d}, {"components", std::move(comps)}, {"box", std::move(box)}};
}

template <class S>
PolyVectorField<S> field_from_json(const Json& j) {
  PolyVectorField<S> f;
  f.e = j.at("e").get<int>();
  f.d = j.at("d").get<int>();
  const auto& comps = j.at("components");
  if (static_cast<int>(comps.size()) != f.e * f.d)
    throw std::invalid_argument("field_from_json: expected d*e component polynomials");
  for (int a = 0; a < f.d; ++a) {
    PolyMap<S> m;
    for (int i = 0; i < f.e; ++i) {
      Polynomial<S> p(f.e);
      for (const auto& mono : comps[a * f.e + i].at("monomials"))
        p.add_term(mono.at("exponents").template get<std::vector<int>>(),
                   scalar_from_json<S>(mono.at("coeff")));
      m.push_back(std::move(p));
    }
    f.comp.push_back(std::move(m));
  }
  for (const auto& pair : j.at("box")) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("field_from_json: box entries are [lo, hi] pairs");
    f.box.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  f.validate();
  return f;
}

template <class S>
Json rough_path_to_json(const BranchedRoughPath<S>& X) {
  Json states = Json::array();
  for (std::size_t i = 0; i < X.size(); ++i) states.push_back(character_to_json(X.state(i)));
  return Json{{"p", X.p()}, {"grid", X.grid()}, {"states", std::move(states)}};
}

template <class S>
BranchedRoughPath<S> rough_path_from_json(const Json& j) {
  double p = j.at("p").get<double>();
  std::vector<double> grid = j.at("grid").get<std::vector<double>>();
  const auto& sj = j.at("states");
  if (sj.empty()) throw std::invalid_argument("rough_path_from_json: no states");
  auto basis = HopfBasis::get(sj[0].at("N").get<int>(), sj[0].at("d").get<int>());
  std::vector<Character<S>> states;
  for (const auto& s : sj) states.push_back(character_from_json<S>(s));
  return BranchedRoughPath<S>(p, basis, std::move(grid), std::move(states));
}

// Generator trees and weights pin the word alphabet an experiment ran over.
inline Json alphabet_to_json(const Alphabet& alph) {
  Json gens = Json::array();
  for (int j = 1; j <= alph.K(); ++j) {
    const Tree& t = alph.basis()->trees()[alph.generator_tree(j)];
    gens.push_back(Json{{"tree", tree_to_json(t)}, {"weight", alph.weight(j)}});
  }
  return Json{{"n", alph.n()}, {"d", alph.d()}, {"K", alph.K()}, {"generators", std::move(gens)}};
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Hash of the canonical dump (object keys sorted by nlohmann), as fixed-width
// hex; embedded in reports so runs can be traced to their exact inputs.
inline std::string json_hash(const Json& j) {
  std::uint64_t h = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace brp
