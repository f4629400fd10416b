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

#include <cmath>
#include <limits>

#include "gatecnn/errors.h"

namespace gatecnn {
namespace {

constexpr __int128 kCodeMin = std::numeric_limits<std::int32_t>::min();
constexpr __int128 kCodeMax = std::numeric_limits<std::int32_t>::max();

// Floor division by 2^shift with the selected rounding.
__int128 shift_round(__int128 v, int shift, Rounding rounding) {
  if (shift == 0) return v;
  // Arithmetic right shift of a signed __int128 is floor division on GCC/Clang.
  __int128 q = v >> shift;
  if (rounding == Rounding::kTruncate) return q;
  const __int128 rem = v - (q << shift);
  const __int128 half = static_cast<__int128>(1) << (shift - 1);
  if (rem > half || (rem == half && (q & 1) != 0)) ++q;
  return q;
}

}  // namespace

void FixedPointSpec::validate() const {
  if (total_bits != 32) {
    throw ValueError("fixed-point total_bits must be 32, got " +
                     std::to_string(total_bits));
  }
  if (frac_bits < 1 || frac_bits > 30) {
    throw ValueError("fixed-point frac_bits must be in [1, 30], got " +
                     std::to_string(frac_bits));
  }
}

std::int32_t FixedPointSpec::min_code() const {
  return std::numeric_limits<std::int32_t>::min();
}

std::int32_t FixedPointSpec::max_code() const {
  return std::numeric_limits<std::int32_t>::max();
}

double FixedPointSpec::min_value() const {
  return std::ldexp(static_cast<double>(min_code()), -frac_bits);
}

double FixedPointSpec::max_value() const {
  return std::ldexp(static_cast<double>(max_code()), -frac_bits);
}

double FixedPointSpec::resolution() const { return std::ldexp(1.0, -frac_bits); }

std::string FixedPointSpec::name() const {
  return "Q" + std::to_string(integer_bits()) + "." + std::to_string(frac_bits);
}

std::string to_string(Rounding r) {
  return r == Rounding::kNearestEven ? "nearest-even" : "truncate";
}

std::string to_string(Overflow o) {
  return o == Overflow::kSaturate ? "saturate" : "wrap";
}

Rounding parse_rounding(const std::string& s) {
  if (s == "nearest-even") return Rounding::kNearestEven;
  if (s == "truncate") return Rounding::kTruncate;
  throw ValueError("unknown rounding mode '" + s + "'");
}

Overflow parse_overflow(const std::string& s) {
  if (s == "saturate") return Overflow::kSaturate;
  if (s == "wrap") return Overflow::kWrap;
  throw ValueError("unknown overflow mode '" + s + "'");
}

FixedScalar fit_code(__int128 code, const FixedPointSpec& spec) {
  if (code >= kCodeMin && code <= kCodeMax) {
    return {static_cast<std::int32_t>(code)};
  }
  if (spec.overflow == Overflow::kSaturate) {
    return {static_cast<std::int32_t>(code < 0 ? kCodeMin : kCodeMax)};
  }
  // Two's-complement wrap: keep the low 32 bits.
  const auto low = static_cast<std::uint32_t>(static_cast<unsigned __int128>(code));
  return {static_cast<std::int32_t>(low)};
}

FixedScalar quantize(double x, const FixedPointSpec& spec) {
  if (std::isnan(x)) return {0};
  if (std::isinf(x)) {
    return {x < 0 ? spec.min_code() : spec.max_code()};
  }
  const double scaled = std::ldexp(x, spec.frac_bits);
  double rounded = std::floor(scaled);
  if (spec.rounding == Rounding::kNearestEven) {
    const double diff = scaled - rounded;
    if (diff > 0.5 || (diff == 0.5 && std::fmod(rounded, 2.0) != 0.0)) {
      rounded += 1.0;
    }
  }
  // 2^100 comfortably exceeds every in-range code; beyond it only the policy
  // matters, and wrap reduces modulo 2^32 first.
  constexpr double kLimit = 1.2676506002282294e30;
  if (std::fabs(rounded) >= kLimit) {
    if (spec.overflow == Overflow::kSaturate) {
      return {rounded < 0 ? spec.min_code() : spec.max_code()};
    }
    rounded = std::fmod(rounded, 4294967296.0);
  }
  return fit_code(static_cast<__int128>(rounded), spec);
}

double dequantize(FixedScalar q, const FixedPointSpec& spec) {
  return std::ldexp(static_cast<double>(q.code), -spec.frac_bits);
}

WideAccumulator accumulate_bias(WideAccumulator acc, FixedScalar bias,
                                const FixedPointSpec& spec) {
  acc.value += static_cast<__int128>(bias.code) << spec.frac_bits;
  return acc;
}

FixedScalar renormalize(WideAccumulator acc, const FixedPointSpec& spec) {
  return fit_code(shift_round(acc.value, spec.frac_bits, spec.rounding), spec);
}

FixedScalar fixed_add(FixedScalar a, FixedScalar b, const FixedPointSpec& spec) {
  return fit_code(static_cast<__int128>(a.code) + b.code, spec);
}

FixedScalar fixed_mul(FixedScalar a, FixedScalar b, const FixedPointSpec& spec) {
  return renormalize(fixed_mac({}, a, b), spec);
}

}  // namespace gatecnn
