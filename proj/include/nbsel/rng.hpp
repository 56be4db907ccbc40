#ifndef NBSEL_RNG_HPP
#define NBSEL_RNG_HPP

#include <cstdint>
#include <limits>

namespace nbsel {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the i-th output is a pure function of (key, i), so a
// stream can be split into independent children by key derivation and any
// draw can be reproduced without replaying the ones before it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  Stream split(std::uint64_t id) const {
    Stream child(0);
    child.key_ = mix64(key_ ^ mix64(id + 0x9e3779b97f4a7c15ULL));
    return child;
  }

  std::uint64_t at(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform in [0, 1) from the draw at `counter`.
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t operator()() { return at(counter_++); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace nbsel

#endif  // NBSEL_RNG_HPP
