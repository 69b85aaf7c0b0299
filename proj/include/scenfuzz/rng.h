#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace scenfuzz {

// Portable random source. The standard distributions are
// implementation-defined, so draws are derived directly from the raw
// mt19937_64 stream to keep campaigns reproducible across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 bits of precision.
  double Canonical() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Canonical(); }

  // Uniform index in [0, n). n must be positive.
  size_t Index(size_t n) {
    return static_cast<size_t>(Canonical() * static_cast<double>(n));
  }

  uint64_t NextU64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace scenfuzz
