#pragma once

#include <cstdint>
#include <stdexcept>

namespace brp {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

// Counter-based stream: output k of stream (seed, instance) is a pure
// function of (seed, instance, k). Instances can be drawn in any order or
// in parallel without touching each other's randomness.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t instance)
      : key_(detail::mix64(detail::mix64(seed + 0x9e3779b97f4a7c15ull) ^
                           (instance * 0xd1b54a32d192ed03ull + 0x8cb92ba72f3d8dd7ull))) {}

  std::uint64_t next_u64() {
    ctr_ += 0x9e3779b97f4a7c15ull;
    return detail::mix64(key_ ^ ctr_);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // inclusive bounds
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace brp
