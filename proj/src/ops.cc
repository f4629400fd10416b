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

#include "gatecnn/ops.h"

#include <algorithm>
#include <string>

#include "gatecnn/errors.h"

namespace gatecnn {
namespace {

void require_rank(const char* op, const char* what, const Tensor& t,
                  std::size_t rank) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": " + what + " must have rank " +
                         std::to_string(rank) + ", got shape " +
                         shape_string(t.shape()));
  }
}

}  // namespace

std::size_t conv_output_extent(std::size_t in, std::size_t kernel,
                               std::size_t stride, std::size_t pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& input, const Tensor& kernel,
              std::span<const double> bias, Extent2 stride, Extent2 padding) {
  require_rank("conv2d", "input", input, 3);
  require_rank("conv2d", "kernel", kernel, 4);
  const std::size_t channels = input.dim(0), height = input.dim(1),
                    width = input.dim(2);
  const std::size_t out_ch = kernel.dim(0), kh = kernel.dim(2),
                    kw = kernel.dim(3);
  if (kernel.dim(1) != channels) {
    throw DimensionError("conv2d: channel axis mismatch, input has " +
                         std::to_string(channels) + " channels, kernel expects " +
                         std::to_string(kernel.dim(1)));
  }
  if (stride.h == 0 || stride.w == 0) {
    throw DimensionError("conv2d: stride must be >= 1 on both axes");
  }
  if (height + 2 * padding.h < kh) {
    throw DimensionError("conv2d: height axis " + std::to_string(height) +
                         " (+2*" + std::to_string(padding.h) +
                         " padding) is smaller than kernel height " +
                         std::to_string(kh));
  }
  if (width + 2 * padding.w < kw) {
    throw DimensionError("conv2d: width axis " + std::to_string(width) +
                         " (+2*" + std::to_string(padding.w) +
                         " padding) is smaller than kernel width " +
                         std::to_string(kw));
  }
  if (!bias.empty() && bias.size() != out_ch) {
    throw DimensionError("conv2d: bias has " + std::to_string(bias.size()) +
                         " entries for " + std::to_string(out_ch) +
                         " output channels");
  }

  const std::size_t out_h = conv_output_extent(height, kh, stride.h, padding.h);
  const std::size_t out_w = conv_output_extent(width, kw, stride.w, padding.w);
  Tensor out({out_ch, out_h, out_w});

  for (std::size_t o = 0; o < out_ch; ++o) {
    const double b = bias.empty() ? 0.0 : bias[o];
    for (std::size_t y = 0; y < out_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          for (std::size_t i = 0; i < kh; ++i) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y * stride.h + i) -
                                      static_cast<std::ptrdiff_t>(padding.h);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(height)) continue;
            for (std::size_t j = 0; j < kw; ++j) {
              const std::ptrdiff_t ix =
                  static_cast<std::ptrdiff_t>(x * stride.w + j) -
                  static_cast<std::ptrdiff_t>(padding.w);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(width)) continue;
              acc += kernel.at(o, c, i, j) *
                     input.at(c, static_cast<std::size_t>(iy),
                              static_cast<std::size_t>(ix));
            }
          }
        }
        out.at(o, y, x) = acc + b;
      }
    }
  }
  return out;
}

Tensor conv1d_time(const Tensor& input, const Tensor& kernel,
                   std::span<const double> bias) {
  require_rank("conv1d_time", "input", input, 2);
  require_rank("conv1d_time", "kernel", kernel, 2);
  const std::size_t channels = input.dim(0), length = input.dim(1);
  const std::size_t taps = kernel.dim(1);
  if (kernel.dim(0) != channels) {
    throw DimensionError("conv1d_time: channel axis mismatch, input has " +
                         std::to_string(channels) + " channels, kernel has " +
                         std::to_string(kernel.dim(0)));
  }
  if (taps % 2 == 0) {
    throw DimensionError("conv1d_time: time axis kernel width " +
                         std::to_string(taps) +
                         " is even; same padding needs an odd width");
  }
  if (!bias.empty() && bias.size() != channels) {
    throw DimensionError("conv1d_time: bias has " + std::to_string(bias.size()) +
                         " entries for " + std::to_string(channels) +
                         " channels");
  }

  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(taps / 2);
  const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(length);
  Tensor out({channels, length});
  for (std::size_t d = 0; d < channels; ++d) {
    const double b = bias.empty() ? 0.0 : bias[d];
    for (std::ptrdiff_t t = 0; t < len; ++t) {
      double acc = 0.0;
      for (std::size_t j = 0; j < taps; ++j) {
        const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - half;
        if (src < 0 || src >= len) continue;
        acc += kernel.at(d, j) * input.at(d, static_cast<std::size_t>(src));
      }
      out.at(d, static_cast<std::size_t>(t)) = acc + b;
    }
  }
  return out;
}

Tensor maxpool2d(const Tensor& input, Extent2 window, Extent2 stride) {
  require_rank("maxpool2d", "input", input, 3);
  if (window.h == 0 || window.w == 0 || stride.h == 0 || stride.w == 0) {
    throw DimensionError("maxpool2d: window and stride must be >= 1");
  }
  const std::size_t channels = input.dim(0), height = input.dim(1),
                    width = input.dim(2);
  if (window.h > height) {
    throw DimensionError("maxpool2d: window height " + std::to_string(window.h) +
                         " exceeds height axis " + std::to_string(height));
  }
  if (window.w > width) {
    throw DimensionError("maxpool2d: window width " + std::to_string(window.w) +
                         " exceeds width axis " + std::to_string(width));
  }
  const std::size_t out_h = (height - window.h) / stride.h + 1;
  const std::size_t out_w = (width - window.w) / stride.w + 1;
  Tensor out({channels, out_h, out_w});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < out_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        double best = input.at(c, y * stride.h, x * stride.w);
        for (std::size_t i = 0; i < window.h; ++i) {
          for (std::size_t j = 0; j < window.w; ++j) {
            best = std::max(best, input.at(c, y * stride.h + i, x * stride.w + j));
          }
        }
        out.at(c, y, x) = best;
      }
    }
  }
  return out;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

}  // namespace gatecnn
