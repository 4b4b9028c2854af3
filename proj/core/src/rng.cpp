#include "spectral/rng.hpp"

#include <cmath>
#include <numbers>

namespace spectral {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

UniformPair uniform_pair(std::uint64_t seed, std::uint64_t index, std::uint32_t slot, StreamTag tag) {
  Philox4x32::Counter ctr{slot, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                          static_cast<std::uint32_t>(tag)};
  Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  auto out = Philox4x32::generate(ctr, key);
  std::uint64_t x = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  std::uint64_t y = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  return {unit_from_bits(x), unit_from_bits(y)};
}

NormalPair normal_pair(std::uint64_t seed, std::uint64_t index, std::uint32_t slot, StreamTag tag) {
  UniformPair u = uniform_pair(seed, index, slot, tag);
  double r = std::sqrt(-2.0 * std::log(u.a));
  double theta = 2.0 * std::numbers::pi * u.b;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace spectral
