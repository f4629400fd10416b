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

// Reference implementations used only for verification.
//
// Nothing here calls into ops.h, backprop or the counting helpers in
// model.h: each routine is a direct, slow transcription (explicit zero
// padding, nested loops, per-element counters) so that it can check the
// production paths rather than echo them.

#ifndef GATECNN_ORACLE_H_
#define GATECNN_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "gatecnn/frame.h"
#include "gatecnn/model.h"
#include "gatecnn/tensor.h"

namespace gatecnn::oracle {

Tensor conv2d(const Tensor& input, const Tensor& kernel,
              std::span<const double> bias, std::size_t stride_h,
              std::size_t stride_w, std::size_t pad_h, std::size_t pad_w);

Tensor conv1d_time(const Tensor& input, const Tensor& kernel,
                   std::span<const double> bias);

Tensor maxpool2d(const Tensor& input, std::size_t window_h,
                 std::size_t window_w);

/// Parameter total from per-layer formulas written out by hand.
std::uint64_t enumerate_params(const GateCNNConfig& cfg);

struct CountedForward {
  std::vector<double> logits;
  std::uint64_t macs = 0;
  std::uint64_t elementwise = 0;
  std::uint64_t flops() const { return 2 * macs + elementwise; }
};

/// Naive forward pass that increments a counter on every multiply-accumulate
/// touching real input (padding taps are skipped) and on every ReLU, gating
/// multiply and residual add.
CountedForward counted_forward(const GateCNNConfig& cfg, const ModelWeights& w,
                               const Tensor& input);

/// Central differences of the cross-entropy loss w.r.t. every weight.
ModelWeights finite_difference_gradients(const GateCNNConfig& cfg,
                                         const ModelWeights& w,
                                         const Tensor& input, std::size_t label,
                                         double eps = 1e-5);

/// Test accuracy of a nearest-class-mean classifier fit on `train`.
double nearest_centroid_accuracy(std::span<const MicroDopplerFrame> train,
                                 std::span<const MicroDopplerFrame> test);

/// |a - b| / max(|a|, |b|, floor). The floor keeps gradients that are
/// smaller than the finite-difference noise from dominating the ratio.
double relative_error(double a, double b, double floor = 1e-6);

}  // namespace gatecnn::oracle

#endif  // GATECNN_ORACLE_H_
