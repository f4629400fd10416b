/* Copyright 2026 The GateCNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "gatecnn/fixed_point.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gatecnn/errors.h"
#include "gatecnn/random.h"

namespace gatecnn {
namespace {

const FixedPointSpec kQ16{};

TEST(FixedPointSpecTest, DefaultIsQ16_16) {
  EXPECT_EQ(kQ16.total_bits, 32);
  EXPECT_EQ(kQ16.frac_bits, 16);
  EXPECT_EQ(kQ16.rounding, Rounding::kNearestEven);
  EXPECT_EQ(kQ16.overflow, Overflow::kSaturate);
  EXPECT_EQ(kQ16.name(), "Q16.16");
}

TEST(FixedPointSpecTest, RangeMatchesFormula) {
  for (int f = 1; f <= 30; ++f) {
    FixedPointSpec s;
    s.frac_bits = f;
    EXPECT_EQ(s.min_value(), -std::ldexp(1.0, 31 - f));
    EXPECT_EQ(s.max_value(), std::ldexp(1.0, 31 - f) - std::ldexp(1.0, -f));
  }
}

TEST(FixedPointSpecTest, RejectsBadFormats) {
  FixedPointSpec s;
  s.frac_bits = 0;
  EXPECT_THROW(s.validate(), ValueError);
  s.frac_bits = 31;
  EXPECT_THROW(s.validate(), ValueError);
  s.frac_bits = 16;
  s.total_bits = 16;
  EXPECT_THROW(s.validate(), ValueError);
}

TEST(QuantizeTest, ExactValues) {
  EXPECT_EQ(quantize(0.0, kQ16).code, 0);
  EXPECT_EQ(quantize(1.0, kQ16).code, 65536);
  EXPECT_EQ(quantize(-1.0, kQ16).code, -65536);
}

TEST(QuantizeTest, PointOneRoundsToNearestCode) {
  // 0.1 * 2^16 = 6553.6; neighbours 6553 and 6554, the latter is nearer.
  const double scaled = 0.1 * 65536.0;
  const double lo = std::floor(scaled), hi = lo + 1.0;
  const double expected = (scaled - lo) < (hi - scaled) ? lo : hi;
  EXPECT_EQ(expected, 6554.0);
  EXPECT_EQ(quantize(0.1, kQ16).code, 6554);
}

TEST(QuantizeTest, TiesGoToEven) {
  // 2.5 and 3.5 LSBs.
  EXPECT_EQ(quantize(2.5 / 65536.0, kQ16).code, 2);
  EXPECT_EQ(quantize(3.5 / 65536.0, kQ16).code, 4);
  EXPECT_EQ(quantize(-2.5 / 65536.0, kQ16).code, -2);
}

TEST(QuantizeTest, TruncateRoundsTowardNegativeInfinity) {
  FixedPointSpec s = kQ16;
  s.rounding = Rounding::kTruncate;
  EXPECT_EQ(quantize(0.1, s).code, 6553);
  EXPECT_EQ(quantize(-0.1, s).code, -6554);
}

TEST(QuantizeTest, SaturatesOutOfRange) {
  EXPECT_EQ(quantize(1e9, kQ16).code, std::numeric_limits<std::int32_t>::max());
  EXPECT_EQ(quantize(-1e9, kQ16).code, std::numeric_limits<std::int32_t>::min());
  EXPECT_EQ(quantize(INFINITY, kQ16).code, std::numeric_limits<std::int32_t>::max());
  EXPECT_EQ(quantize(NAN, kQ16).code, 0);
}

TEST(QuantizeTest, WrapKeepsLow32Bits) {
  FixedPointSpec s = kQ16;
  s.overflow = Overflow::kWrap;
  // 32768.0 -> code 2^31, wraps to INT32_MIN.
  EXPECT_EQ(quantize(32768.0, s).code, std::numeric_limits<std::int32_t>::min());
  // 65536.0 + 1.0 -> 2^32 + 2^16 wraps to 2^16.
  EXPECT_EQ(quantize(65537.0, s).code, 65536);
}

TEST(QuantizeTest, RoundTripWithinHalfLsb) {
  Rng rng(7);
  for (int f : {8, 16, 24}) {
    FixedPointSpec s;
    s.frac_bits = f;
    const double half = std::ldexp(1.0, -f - 1);
    for (int i = 0; i < 5000; ++i) {
      const double x = rng.uniform(s.min_value(), s.max_value());
      const double err = dequantize(quantize(x, s), s) - x;
      EXPECT_LE(std::fabs(err), half) << "x=" << x << " f=" << f;
    }
  }
}

TEST(QuantizeTest, CodesRoundTripExactly) {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const FixedScalar q{static_cast<std::int32_t>(rng.next())};
    EXPECT_EQ(quantize(dequantize(q, kQ16), kQ16), q);
  }
  for (std::int32_t c : {std::numeric_limits<std::int32_t>::min(), -1, 0, 1,
                         std::numeric_limits<std::int32_t>::max()}) {
    EXPECT_EQ(quantize(dequantize({c}, kQ16), kQ16).code, c);
  }
}

TEST(QuantizeTest, MonotoneIncludingSaturation) {
  Rng rng(3);
  for (int i = 0; i < 20000; ++i) {
    double a = rng.uniform(-70000.0, 70000.0), b = rng.uniform(-70000.0, 70000.0);
    if (a > b) std::swap(a, b);
    EXPECT_LE(quantize(a, kQ16).code, quantize(b, kQ16).code);
  }
}

TEST(FixedMacTest, SimpleProducts) {
  const auto one = quantize(1.0, kQ16), half = quantize(0.5, kQ16);
  EXPECT_EQ(dequantize(renormalize(fixed_mac({}, one, one), kQ16), kQ16), 1.0);
  EXPECT_EQ(dequantize(renormalize(fixed_mac({}, half, half), kQ16), kQ16), 0.25);
  EXPECT_EQ(dequantize(fixed_mul(half, half, kQ16), kQ16), 0.25);
}

TEST(FixedMacTest, DotProductMatchesFloatWithinBound) {
  Rng rng(5);
  const double lsb = kQ16.resolution();
  for (int trial = 0; trial < 200; ++trial) {
    constexpr int n = 16;
    WideAccumulator acc;
    double ref = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto a = quantize(rng.uniform(-4.0, 4.0), kQ16);
      const auto b = quantize(rng.uniform(-4.0, 4.0), kQ16);
      acc = fixed_mac(acc, a, b);
      ref += dequantize(a, kQ16) * dequantize(b, kQ16);
    }
    const double got = dequantize(renormalize(acc, kQ16), kQ16);
    EXPECT_LE(std::fabs(got - ref), lsb * n);
  }
}

TEST(FixedMacTest, AccumulatorHoldsExtremeSums) {
  // 2^11 products of (INT32_MIN)^2 = 2^62 each; 2^73 in total, far beyond
  // int64 but exact in 128 bits. Renormalized it saturates.
  const FixedScalar m{std::numeric_limits<std::int32_t>::min()};
  WideAccumulator acc;
  for (int i = 0; i < 2048; ++i) acc = fixed_mac(acc, m, m);
  EXPECT_TRUE(acc.value == (static_cast<__int128>(1) << 73));
  EXPECT_EQ(renormalize(acc, kQ16).code, std::numeric_limits<std::int32_t>::max());
}

TEST(FixedMacTest, SaturatingAddStaysInRange) {
  const FixedScalar big{std::numeric_limits<std::int32_t>::max() - 5};
  EXPECT_EQ(fixed_add(big, {100}, kQ16).code, std::numeric_limits<std::int32_t>::max());
  EXPECT_EQ(fixed_add({-big.code}, {-100}, kQ16).code,
            std::numeric_limits<std::int32_t>::min());
  EXPECT_EQ(fixed_add({3}, {4}, kQ16).code, 7);
}

TEST(FixedMacTest, RenormalizeRoundsHalfToEven) {
  // acc = 1.5 LSB and 2.5 LSB in 2f scale.
  const __int128 lsb = static_cast<__int128>(1) << 16;
  EXPECT_EQ(renormalize({lsb + lsb / 2}, kQ16).code, 2);
  EXPECT_EQ(renormalize({2 * lsb + lsb / 2}, kQ16).code, 2);
  EXPECT_EQ(renormalize({-(lsb + lsb / 2)}, kQ16).code, -2);
}

}  // namespace
}  // namespace gatecnn
