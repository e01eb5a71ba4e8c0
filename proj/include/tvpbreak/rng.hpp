#pragma once

#include <cstdint>
#include <random>

namespace tvpbreak {

/// Portable pseudo-random source for the synthetic generators.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard (the 10000th draw after default seeding is 9981545732273789042).
/// Uniforms take the top 53 bits; normals use the Marsaglia polar method with the
/// second variate cached. std::*_distribution is avoided because its algorithms
/// are implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tvpbreak
