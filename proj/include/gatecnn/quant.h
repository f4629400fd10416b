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

// Post-training conversion of a float GateCNN to a single global 32-bit
// Q-format, and an integer-only forward pass over it.
//
// Every layer multiplies in double width and rounds once when it writes its
// output (bias is added at 2*frac_bits scale before that rounding). The gated
// combine folds the residual add into the same accumulator as the gating
// multiply, so y also sees a single rounding.

#ifndef GATECNN_QUANT_H_
#define GATECNN_QUANT_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gatecnn/fixed_point.h"
#include "gatecnn/frame.h"
#include "gatecnn/model.h"

namespace gatecnn {

struct FixedTensor {
  Shape shape;
  std::vector<std::int32_t> codes;

  std::size_t size() const { return codes.size(); }
  friend bool operator==(const FixedTensor&, const FixedTensor&) = default;
};

FixedTensor quantize_tensor(const Tensor& t, const FixedPointSpec& spec,
                            std::size_t* saturations = nullptr);
Tensor dequantize_tensor(const FixedTensor& t, const FixedPointSpec& spec);

struct QuantizedModel {
  FixedPointSpec spec;
  GateCNNConfig config;
  /// In ModelWeights::names() order.
  std::array<FixedTensor, ModelWeights::kTensorCount> tensors;
  /// Weights that fell outside the representable range when quantized.
  std::size_t saturations = 0;
  std::vector<std::string> warnings;

  const FixedTensor& tensor(std::string_view name) const;
  std::size_t parameter_count() const;

  /// Compares spec, config and every code; bookkeeping fields are ignored.
  bool same_codes(const QuantizedModel& other) const;
};

/// Elementwise quantization. Saturated weights are counted and produce a
/// warning rather than an error.
QuantizedModel quantize_model(const GateCNNConfig& cfg, const ModelWeights& w,
                              const FixedPointSpec& spec = {});

ModelWeights dequantize_model(const QuantizedModel& qm);

/// Integer-only inference. The input is quantized with qm.spec on entry.
std::vector<FixedScalar> forward_fixed(const QuantizedModel& qm,
                                       const Tensor& input);

std::size_t predict_fixed(const QuantizedModel& qm, const Tensor& input);

struct StageRange {
  std::string stage;
  double min = 0.0;
  double max = 0.0;
  /// ceil(log2(max |value|)) magnitude bits plus one guard bit; 1 for an
  /// all-zero stage. Sign is not included.
  int required_integer_bits = 1;
};

struct RangeAudit {
  std::vector<StageRange> stages;

  int max_required_integer_bits() const;
  /// True when every stage's magnitude bits fit beside the sign bit in
  /// spec.integer_bits().
  bool fits(const FixedPointSpec& spec) const;
};

int required_integer_bits(double max_abs);

/// Per-stage activation extrema of the float model over a calibration set.
RangeAudit audit_ranges(const GateCNNConfig& cfg, const ModelWeights& w,
                        std::span<const MicroDopplerFrame> calibration);

/// One line per stage: "stage=<name> min=<v> max=<v> integer_bits=<n>".
std::string format_audit(const RangeAudit& audit);

/// Paired float/fixed comparison over a set of frames.
struct FidelityReport {
  std::size_t frames = 0;
  std::size_t argmax_agreements = 0;
  /// Largest |fixed - float| logit error seen per class.
  std::vector<double> max_abs_logit_error;

  double agreement() const {
    return frames ? static_cast<double>(argmax_agreements) /
                        static_cast<double>(frames)
                  : 0.0;
  }
};

FidelityReport compare_fixed_float(const GateCNNConfig& cfg,
                                   const ModelWeights& w,
                                   const QuantizedModel& qm,
                                   std::span<const MicroDopplerFrame> frames);

std::string format_fidelity(const FidelityReport& r);

// GCNQ files: "GCNQ", version u16, total_bits u8, frac_bits u8, rounding u8,
// overflow u8, config (as in GCNN), then the 18 tensors as in GCNN with
// int32 little-endian codes instead of float64.
inline constexpr std::uint16_t kQuantizedFormatVersion = 1;

std::string serialize_quantized(const QuantizedModel& qm);
QuantizedModel deserialize_quantized(std::string_view bytes);
void save_quantized(const std::string& path, const QuantizedModel& qm);
QuantizedModel load_quantized(const std::string& path);

}  // namespace gatecnn

#endif  // GATECNN_QUANT_H_
