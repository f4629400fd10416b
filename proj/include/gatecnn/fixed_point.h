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

// 32-bit signed fixed-point scalars (Qm.f) with a double-width accumulator.
//
// Accumulation strategy: products of two 32-bit codes are formed exactly in
// 64 bits (|a*b| <= 2^62) and summed in a signed 128-bit accumulator. A dot
// product of n terms is bounded by n * 2^62, so any n <= 2^64 is exact; the
// largest dot product in this engine has a few hundred terms (<= 2^11 keeps
// the sum below 2^73). Rounding back to frac_bits happens once, in
// renormalize(), which then saturates (or wraps) to 32 bits.

#ifndef GATECNN_FIXED_POINT_H_
#define GATECNN_FIXED_POINT_H_

#include <cstdint>
#include <string>

namespace gatecnn {

enum class Rounding : std::uint8_t { kNearestEven = 0, kTruncate = 1 };
enum class Overflow : std::uint8_t { kSaturate = 0, kWrap = 1 };

struct FixedPointSpec {
  int total_bits = 32;
  int frac_bits = 16;
  Rounding rounding = Rounding::kNearestEven;
  Overflow overflow = Overflow::kSaturate;

  /// Throws ValueError unless total_bits == 32 and frac_bits in [1, 30].
  void validate() const;

  std::int32_t min_code() const;
  std::int32_t max_code() const;
  double min_value() const;
  double max_value() const;
  /// 2^-frac_bits.
  double resolution() const;
  int integer_bits() const { return total_bits - frac_bits; }
  /// "Q16.16" style label.
  std::string name() const;

  friend bool operator==(const FixedPointSpec&, const FixedPointSpec&) =
      default;
};

std::string to_string(Rounding r);
std::string to_string(Overflow o);
Rounding parse_rounding(const std::string& s);
Overflow parse_overflow(const std::string& s);

struct FixedScalar {
  std::int32_t code = 0;
  friend auto operator<=>(const FixedScalar&, const FixedScalar&) = default;
};

/// Signed 128-bit sum of code products, scaled by 2^(2*frac_bits).
struct WideAccumulator {
  __int128 value = 0;
};

/// Nearest representable code under spec.rounding. Out-of-range inputs
/// saturate or wrap per spec.overflow; +-inf always saturate, NaN maps to 0.
FixedScalar quantize(double x, const FixedPointSpec& spec);
double dequantize(FixedScalar q, const FixedPointSpec& spec);

/// acc + a.code * b.code, exact.
inline WideAccumulator fixed_mac(WideAccumulator acc, FixedScalar a,
                                 FixedScalar b) {
  acc.value += static_cast<__int128>(static_cast<std::int64_t>(a.code) *
                                     static_cast<std::int64_t>(b.code));
  return acc;
}

/// Adds a code in frac_bits scale to an accumulator in 2*frac_bits scale.
WideAccumulator accumulate_bias(WideAccumulator acc, FixedScalar bias,
                                const FixedPointSpec& spec);

/// Rounds an accumulator from 2*frac_bits back to frac_bits, then applies the
/// overflow policy.
FixedScalar renormalize(WideAccumulator acc, const FixedPointSpec& spec);

/// Applies the overflow policy to an integer code that may exceed 32 bits.
FixedScalar fit_code(__int128 code, const FixedPointSpec& spec);

FixedScalar fixed_add(FixedScalar a, FixedScalar b, const FixedPointSpec& spec);
FixedScalar fixed_mul(FixedScalar a, FixedScalar b, const FixedPointSpec& spec);

}  // namespace gatecnn

#endif  // GATECNN_FIXED_POINT_H_
