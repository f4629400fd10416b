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

// GateCNN: a dimension-gated CNN over micro-Doppler spectrograms.
//
// Data flow for one frame x of shape C0 x H0 x W0:
//
//   x1     = conv(w_c0, x)                     fuse channels, same padding
//   x_ds   = maxpool(x1)                       C1 x H' x W'
//   x_c1   = conv(w_c1, x_ds)                  H' x 1 kernel -> D x W'
//   z      = dwconv_t(w_g, x_c1)               gate, D x W'
//   x_c2   = dwconv_t(w_p, x_c1)               content, D x W'
//   x_c3   = relu(conv(w_c2, x_c2 as 1xDxW'))  K x D x W'
//   x_c4   = relu(conv(w_c3, x_c3))            K x D x W'
//   x_c5   = conv(w_c4, x_c4)                  D x W'
//   y      = x_c5 * relu(z) + x_c1
//   v      = conv(w_avg, y as 1xDxW')          D x 1 kernel -> W'
//   logits = w_cls v + b_cls                   N_cls

#ifndef GATECNN_MODEL_H_
#define GATECNN_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gatecnn/frame.h"
#include "gatecnn/ops.h"
#include "gatecnn/tensor.h"

namespace gatecnn {

/// Architecture hyperparameters. The defaults land at 2,826 parameters and
/// 0.249 M FLOPs per inference for a 1 x 30 x 28 input and six classes.
struct GateCNNConfig {
  std::size_t in_channels = 1;
  std::size_t doppler_bins = 30;
  std::size_t time_steps = 28;
  std::size_t fuse_channels = 1;
  std::size_t fuse_kernel = 3;  // odd, same padding
  Extent2 pool = {2, 2};
  std::size_t embed_dim = 4;
  std::size_t gate_taps = 3;  // odd
  std::size_t content_channels = 16;
  std::size_t cascade_kernel = 3;  // odd, same padding
  std::size_t num_classes = 6;

  /// Throws ValueError describing the first violated constraint.
  void validate() const;

  std::size_t pooled_height() const { return doppler_bins / pool.h; }
  std::size_t pooled_width() const { return time_steps / pool.w; }
  Shape input_shape() const { return {in_channels, doppler_bins, time_steps}; }

  friend bool operator==(const GateCNNConfig&, const GateCNNConfig&) = default;
};

std::string describe(const GateCNNConfig& cfg);

/// All learnable tensors. Biases are rank-1.
struct ModelWeights {
  Tensor w_c0, b_c0;    // C1 x C0 x kf x kf
  Tensor w_c1, b_c1;    // D x C1 x H' x 1
  Tensor w_g, b_g;      // D x k_t
  Tensor w_p, b_p;      // D x k_t
  Tensor w_c2, b_c2;    // K x 1 x kc x kc
  Tensor w_c3, b_c3;    // K x K x kc x kc
  Tensor w_c4, b_c4;    // 1 x K x kc x kc
  Tensor w_avg, b_avg;  // 1 x 1 x D x 1
  Tensor w_cls, b_cls;  // N x W'

  static constexpr std::size_t kTensorCount = 18;
  static const std::array<std::string_view, kTensorCount>& names();

  /// Tensors in the fixed serialization order given by names().
  std::array<Tensor*, kTensorCount> tensors();
  std::array<const Tensor*, kTensorCount> tensors() const;

  /// Zero-filled weights with shapes for cfg.
  static ModelWeights zeros(const GateCNNConfig& cfg);

  std::size_t parameter_count() const;
  bool all_finite() const;

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

/// Expected shape of every tensor, in names() order.
std::array<Shape, ModelWeights::kTensorCount> weight_shapes(
    const GateCNNConfig& cfg);

/// Throws DimensionError naming the first tensor whose shape disagrees.
void check_weights(const GateCNNConfig& cfg, const ModelWeights& w);

/// Every intermediate activation of one forward pass.
struct ForwardTrace {
  Tensor input;    // C0 x H0 x W0
  Tensor x1;       // C1 x H0 x W0
  Tensor x_ds;     // C1 x H' x W'
  Tensor x_conv1;  // D x W'
  Tensor z;        // D x W'
  Tensor x_conv2;  // D x W'
  Tensor x_conv3;  // K x D x W'
  Tensor x_conv4;  // K x D x W'
  Tensor x_conv5;  // D x W'
  Tensor y;        // D x W'
  Tensor v;        // W'
  Tensor logits;   // N_cls
};

ForwardTrace forward(const GateCNNConfig& cfg, const ModelWeights& w,
                     const Tensor& input);
inline ForwardTrace forward(const GateCNNConfig& cfg, const ModelWeights& w,
                            const MicroDopplerFrame& frame) {
  return forward(cfg, w, frame.data);
}

/// Index of the largest logit; ties go to the lowest index.
std::size_t argmax(std::span<const double> logits);

std::size_t predict(const GateCNNConfig& cfg, const ModelWeights& w,
                    const Tensor& input);

/// w_avg = 1/D with zero bias; everything else i.i.d. uniform in
/// [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases sharing their weight's bound.
ModelWeights init_weights(const GateCNNConfig& cfg, std::uint64_t seed);

/// Per-tensor fan-in used by init_weights, in names() order (0 for w_avg and
/// b_avg, which are not drawn).
std::array<std::size_t, ModelWeights::kTensorCount> fan_ins(
    const GateCNNConfig& cfg);

/// Arithmetic performed by one pipeline stage.
///
/// `macs` counts multiply-accumulates that touch real data (zero-padding
/// taps are skipped, bias adds are free). `elementwise` counts ReLU, the
/// gating multiply and the residual add, one op per element. `comparisons`
/// counts max-pool compares; they are not part of the FLOP total.
struct StageWork {
  std::string name;
  std::uint64_t macs = 0;
  std::uint64_t elementwise = 0;
  std::uint64_t comparisons = 0;
};

/// Stage names, in execution order.
inline constexpr std::array<std::string_view, 11> kStageNames = {
    "fuse",     "pool",     "embed",    "gate",    "content", "cascade1",
    "cascade2", "cascade3", "combine",  "average", "classify"};

std::vector<StageWork> stage_work(const GateCNNConfig& cfg);

std::uint64_t param_count(const GateCNNConfig& cfg);

/// 2 * MACs + elementwise ops (multiply-accumulate counted as two FLOPs).
std::uint64_t flop_count(const GateCNNConfig& cfg);

}  // namespace gatecnn

#endif  // GATECNN_MODEL_H_
