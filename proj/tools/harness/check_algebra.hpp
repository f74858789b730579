#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace brp::harness {

struct AlgebraCheckOptions {
  int N = 4;
  int d = 2;
  std::uint64_t seed = 0;
  int random_characters = 4;  // character pairs drawn for the convolution suites
  // Flips the sign of the proper cut term of the two-vertex ladder in a local
  // copy of the coproduct table before running the suites. The run must then
  // fail and name that ladder; exercises the checker itself, not the library.
  bool inject_cut_sign_flip = false;
};

struct SuiteResult {
  std::string name;
  bool pass = true;
  long long checks = 0;
  std::string counterexample;  // first failing object, empty when pass
};

struct AlgebraCheckReport {
  bool pass = true;
  long long checks = 0;
  std::vector<SuiteResult> suites;
  std::string counterexample;  // from the first failing suite
};

// Exhaustive exact verification of the Hopf-algebraic identities on the basis
// in degree <= N with d labels: counit laws, coassociativity of both
// coproducts, tree/forest table consistency, the coproducts being algebra
// morphisms for the disjoint union, closure of characters under convolution,
// the antipode recursion against convolution inverses, associativity and unit
// laws of the grafting product, and multiplicativity of symmetry factors.
AlgebraCheckReport check_algebra(const AlgebraCheckOptions& opt);

}  // namespace brp::harness
