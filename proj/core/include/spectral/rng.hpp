#pragma once

#include <array>
#include <cstdint>

namespace spectral {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: every output block is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Uniform on (0, 1) from the top 52 bits at cell midpoints; never returns 0 or 1.
inline double unit_from_bits(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

struct NormalPair {
  double a;
  double b;
};

/// Stream tags separate independent uses of the same (seed, index, slot).
enum class StreamTag : std::uint32_t {
  Synthesis = 0,
  CharFunctional = 1,
  CommonGrid = 2,
  Parameters = 3,  ///< random inputs for test suites
};

struct UniformPair {
  double a;
  double b;
};

/// Two independent uniforms on (0, 1) from the substream of normal_pair.
UniformPair uniform_pair(std::uint64_t seed, std::uint64_t index, std::uint32_t slot, StreamTag tag);

/// Two independent N(0, 1) draws for substream (seed, index, slot, tag):
/// key = seed, counter = (slot, index lo, index hi, tag), Box–Muller on the
/// two 64-bit halves of the output block.
NormalPair normal_pair(std::uint64_t seed, std::uint64_t index, std::uint32_t slot, StreamTag tag);

}  // namespace spectral
