#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "spectral/rng.hpp"

using namespace spectral;

TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UnitFromBitsStaysOpen) {
  EXPECT_GT(unit_from_bits(0), 0.0);
  EXPECT_LT(unit_from_bits(~0ull), 1.0);
  EXPECT_DOUBLE_EQ(unit_from_bits(0), 0x1.0p-53);
  EXPECT_EQ(unit_from_bits(~0ull), 1.0 - 0x1.0p-53);
}

TEST(NormalPair, SubstreamsAreDistinctAndDeterministic) {
  std::set<double> seen;
  for (std::uint32_t slot = 0; slot < 4; ++slot)
    for (std::uint64_t idx : {0ull, 1ull, 1ull << 32})
      for (auto tag : {StreamTag::Synthesis, StreamTag::CharFunctional, StreamTag::CommonGrid})
        EXPECT_TRUE(seen.insert(normal_pair(9, idx, slot, tag).a).second);
  NormalPair a = normal_pair(123, 45, 6, StreamTag::Synthesis), b = normal_pair(123, 45, 6, StreamTag::Synthesis);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.b, b.b);
  EXPECT_NE(normal_pair(1, 0, 0, StreamTag::Synthesis).a, normal_pair(1ull << 32, 0, 0, StreamTag::Synthesis).a);
}

TEST(NormalPair, MomentsMatchStandardNormal) {
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0, cross = 0;
  for (int i = 0; i < n; ++i) {
    NormalPair z = normal_pair(2024, i, 3, StreamTag::Synthesis);
    s1 += z.a + z.b;
    s2 += z.a * z.a + z.b * z.b;
    s4 += std::pow(z.a, 4) + std::pow(z.b, 4);
    cross += z.a * z.b;
  }
  double m = 2.0 * n;
  EXPECT_NEAR(s1 / m, 0.0, 4.0 / std::sqrt(m));
  EXPECT_NEAR(s2 / m, 1.0, 4.0 * std::sqrt(2.0 / m));
  EXPECT_NEAR(s4 / m, 3.0, 4.0 * std::sqrt(96.0 / m));
  EXPECT_NEAR(cross / n, 0.0, 4.0 / std::sqrt(n));
}
