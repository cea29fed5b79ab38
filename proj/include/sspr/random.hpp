#pragma once

#include <cstdint>
#include <random>

namespace sspr {

/// Portable random stream: std::mt19937_64 (its output sequence is fixed by
/// the C++ standard) with hand-written variate transforms, so draws are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open();
  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Gamma(shape, scale) variate by Marsaglia-Tsang squeeze; shape < 1 uses the
/// U^(1/shape) boost. Throws ConfigError for nonpositive parameters.
double gamma_sampler(double shape, double scale, Rng& rng);

}  // namespace sspr
