#pragma once

#include <cstdint>
#include <limits>

namespace dyadlab {

/// SplitMix64 generator. Used both as a UniformRandomBitGenerator and as the
/// counter-based seed splitter, so every stream is a pure function of
/// (root seed, stream id) and independent of evaluation order.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the `stream`-th child of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable sampling helpers (std:: distributions differ between standard
/// libraries, which would break byte-identical reports).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  bool coin() { return (gen_() >> 63) != 0; }

 private:
  SplitMix64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dyadlab
