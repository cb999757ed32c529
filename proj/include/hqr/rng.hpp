#ifndef HQR_RNG_HPP
#define HQR_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace hqr {

/// Reproducible 64-bit generator: xoshiro256** whose state is filled by
/// four successive splitmix64 outputs of the seed. Normal deviates come
/// from the Box-Muller transform, consuming two uniforms per pair and
/// returning the cosine branch first. The stream is fully specified so other
/// implementations can reproduce it (see README).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hqr

#endif  // HQR_RNG_HPP
