#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace surfbench {

/// splitmix64 finalizer; the mixing function behind all sub-seeding.
std::uint64_t mix64(std::uint64_t x);

/// Stage seed = mix(global, fnv1a(stage), item). Stages never share a stream.
std::uint64_t sub_seed(std::uint64_t global, std::string_view stage, std::uint64_t item = 0);

/// Seeded generator with platform-independent distributions (std::*_distribution
/// algorithms are implementation-defined, which would break reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Marsaglia polar method).
  double normal();
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace surfbench
