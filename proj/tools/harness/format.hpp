#pragma once

#include <string>

#include "brp/forest.hpp"

namespace brp::harness {

// Compact bracket notation: a 2-labelled root with two children reads 2[1,1[2]].
inline std::string format_tree(const Tree& t) {
  std::string s = std::to_string(t.label());
  const auto& ch = t.children();
  if (!ch.empty()) {
    s += '[';
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (i) s += ',';
      s += format_tree(ch[i]);
    }
    s += ']';
  }
  return s;
}

inline std::string format_forest(const Forest& f) {
  if (f.degree() == 0) return "1";
  std::string s;
  for (const auto& t : f.expand()) {
    if (!s.empty()) s += '.';
    s += format_tree(t);
  }
  return s;
}

}  // namespace brp::harness
