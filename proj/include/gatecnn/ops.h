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

#ifndef GATECNN_OPS_H_
#define GATECNN_OPS_H_

#include <cstddef>
#include <span>

#include "gatecnn/tensor.h"

namespace gatecnn {

/// (height, width) pair used for strides, paddings and pooling windows.
struct Extent2 {
  std::size_t h = 1;
  std::size_t w = 1;
  friend bool operator==(const Extent2&, const Extent2&) = default;
};

/// Output length of a sliding window along one axis.
std::size_t conv_output_extent(std::size_t in, std::size_t kernel,
                               std::size_t stride, std::size_t pad);

/// Cross-correlation (no kernel flip) with zero padding.
///   input:  C x H x W
///   kernel: O x C x kh x kw
///   bias:   O values, or empty for no bias
/// Output is O x H_out x W_out with H_out = (H + 2*pad.h - kh) / stride.h + 1.
Tensor conv2d(const Tensor& input, const Tensor& kernel,
              std::span<const double> bias, Extent2 stride = {1, 1},
              Extent2 padding = {0, 0});

/// Depthwise convolution along the last axis with same zero padding.
///   input: D x L, kernel: D x k (k odd), bias: D values or empty.
Tensor conv1d_time(const Tensor& input, const Tensor& kernel,
                   std::span<const double> bias);

/// Max over each window with floor semantics on ragged edges. Stride defaults
/// to the window.
Tensor maxpool2d(const Tensor& input, Extent2 window, Extent2 stride);
inline Tensor maxpool2d(const Tensor& input, Extent2 window) {
  return maxpool2d(input, window, window);
}

Tensor relu(const Tensor& input);

}  // namespace gatecnn

#endif  // GATECNN_OPS_H_
