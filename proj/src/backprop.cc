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

#include <algorithm>
#include <cmath>

#include "gatecnn/errors.h"
#include "gatecnn/train.h"

namespace gatecnn {

Gradients& Gradients::operator+=(const Gradients& other) {
  auto mine = tensors();
  const auto theirs = other.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    if (mine[i]->shape() != theirs[i]->shape()) {
      throw DimensionError("gradient '" + std::string(names()[i]) +
                           "' shape mismatch in accumulation");
    }
    auto dst = mine[i]->data();
    const auto src = theirs[i]->data();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
  return *this;
}

Gradients& Gradients::operator*=(double scale) {
  for (Tensor* t : tensors()) {
    for (double& v : t->data()) v *= scale;
  }
  return *this;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernel,
                            const Tensor& grad_out, Extent2 stride,
                            Extent2 padding, bool want_input_grad) {
  const std::size_t channels = input.dim(0), height = input.dim(1),
                    width = input.dim(2);
  const std::size_t out_ch = kernel.dim(0), kh = kernel.dim(2),
                    kw = kernel.dim(3);
  const std::size_t out_h = grad_out.dim(1), out_w = grad_out.dim(2);
  if (grad_out.dim(0) != out_ch) {
    throw DimensionError("conv2d_backward: grad channel axis mismatch");
  }

  Conv2dGrads g;
  g.kernel = Tensor(kernel.shape());
  g.bias = Tensor({out_ch});
  if (want_input_grad) g.input = Tensor(input.shape());

  for (std::size_t o = 0; o < out_ch; ++o) {
    double bias_acc = 0.0;
    for (std::size_t y = 0; y < out_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        const double go = grad_out.at(o, y, x);
        bias_acc += go;
        if (go == 0.0) continue;
        for (std::size_t c = 0; c < channels; ++c) {
          for (std::size_t i = 0; i < kh; ++i) {
            const std::ptrdiff_t iy =
                static_cast<std::ptrdiff_t>(y * stride.h + i) -
                static_cast<std::ptrdiff_t>(padding.h);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(height)) continue;
            for (std::size_t j = 0; j < kw; ++j) {
              const std::ptrdiff_t ix =
                  static_cast<std::ptrdiff_t>(x * stride.w + j) -
                  static_cast<std::ptrdiff_t>(padding.w);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(width)) continue;
              const auto uy = static_cast<std::size_t>(iy);
              const auto ux = static_cast<std::size_t>(ix);
              g.kernel.at(o, c, i, j) += go * input.at(c, uy, ux);
              if (want_input_grad) {
                g.input.at(c, uy, ux) += go * kernel.at(o, c, i, j);
              }
            }
          }
        }
      }
    }
    g.bias[o] = bias_acc;
  }
  return g;
}

Conv1dGrads conv1d_time_backward(const Tensor& input, const Tensor& kernel,
                                 const Tensor& grad_out) {
  const std::size_t channels = input.dim(0), length = input.dim(1);
  const std::size_t taps = kernel.dim(1);
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(taps / 2);
  const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(length);

  Conv1dGrads g;
  g.input = Tensor(input.shape());
  g.kernel = Tensor(kernel.shape());
  g.bias = Tensor({channels});
  for (std::size_t d = 0; d < channels; ++d) {
    for (std::ptrdiff_t t = 0; t < len; ++t) {
      const double go = grad_out.at(d, static_cast<std::size_t>(t));
      g.bias[d] += go;
      for (std::size_t j = 0; j < taps; ++j) {
        const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - half;
        if (src < 0 || src >= len) continue;
        const auto us = static_cast<std::size_t>(src);
        g.kernel.at(d, j) += go * input.at(d, us);
        g.input.at(d, us) += go * kernel.at(d, j);
      }
    }
  }
  return g;
}

Tensor maxpool2d_backward(const Tensor& input, Extent2 window, Extent2 stride,
                          const Tensor& grad_out) {
  Tensor g(input.shape());
  const std::size_t channels = grad_out.dim(0), out_h = grad_out.dim(1),
                    out_w = grad_out.dim(2);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < out_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        std::size_t by = y * stride.h, bx = x * stride.w;
        double best = input.at(c, by, bx);
        for (std::size_t i = 0; i < window.h; ++i) {
          for (std::size_t j = 0; j < window.w; ++j) {
            const double v = input.at(c, y * stride.h + i, x * stride.w + j);
            if (v > best) {
              best = v;
              by = y * stride.h + i;
              bx = x * stride.w + j;
            }
          }
        }
        g.at(c, by, bx) += grad_out.at(c, y, x);
      }
    }
  }
  return g;
}

Tensor relu_backward(const Tensor& pre_or_post_activation,
                     const Tensor& grad_out) {
  Tensor g = grad_out;
  const auto act = pre_or_post_activation.data();
  auto out = g.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(act[i] > 0.0)) out[i] = 0.0;
  }
  return g;
}

double cross_entropy(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw ValueError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(logits.size()) + " classes");
  }
  for (double v : logits) {
    if (!std::isfinite(v)) throw NumericError("cross_entropy: non-finite logit");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - peak);
  return std::log(sum) - (logits[label] - peak);
}

std::vector<double> cross_entropy_grad(std::span<const double> logits,
                                       std::size_t label) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> g(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    g[i] = std::exp(logits[i] - peak);
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  g[label] -= 1.0;
  return g;
}

BackwardResult backward(const GateCNNConfig& cfg, const ModelWeights& w,
                        const Tensor& input, std::size_t label) {
  const ForwardTrace t = forward(cfg, w, input);
  const std::size_t d = cfg.embed_dim, wp = cfg.pooled_width();
  const std::size_t classes = cfg.num_classes;
  const Extent2 fuse_pad{cfg.fuse_kernel / 2, cfg.fuse_kernel / 2};
  const Extent2 cascade_pad{cfg.cascade_kernel / 2, cfg.cascade_kernel / 2};

  BackwardResult r;
  r.loss = cross_entropy(t.logits.data(), label);
  Gradients& g = r.grads;
  g = Gradients::zeros(cfg);

  // Classifier: logits = w_cls v + b_cls.
  const std::vector<double> dlogits = cross_entropy_grad(t.logits.data(), label);
  Tensor dv({wp});
  for (std::size_t n = 0; n < classes; ++n) {
    g.b_cls[n] = dlogits[n];
    for (std::size_t j = 0; j < wp; ++j) {
      g.w_cls.at(n, j) = dlogits[n] * t.v[j];
      dv[j] += w.w_cls.at(n, j) * dlogits[n];
    }
  }

  // Averaging conv over the Doppler axis.
  const Tensor y3 = t.y.reshaped({1, d, wp});
  Conv2dGrads avg = conv2d_backward(y3, w.w_avg, dv.reshaped({1, 1, wp}),
                                    {1, 1}, {0, 0});
  g.w_avg = std::move(avg.kernel);
  g.b_avg = std::move(avg.bias);
  const Tensor dy = avg.input.reshaped({d, wp});

  // Gated combine: y = x5 * relu(z) + x1.
  Tensor dx5({d, wp}), dz({d, wp}), dx1 = dy;
  for (std::size_t i = 0; i < dy.size(); ++i) {
    const bool open = t.z[i] > 0.0;
    dx5[i] = open ? dy[i] * t.z[i] : 0.0;
    dz[i] = open ? dy[i] * t.x_conv5[i] : 0.0;
  }

  // Content cascade, last layer first.
  Conv2dGrads c4 = conv2d_backward(t.x_conv4, w.w_c4, dx5.reshaped({1, d, wp}),
                                   {1, 1}, cascade_pad);
  g.w_c4 = std::move(c4.kernel);
  g.b_c4 = std::move(c4.bias);
  Conv2dGrads c3 = conv2d_backward(t.x_conv3, w.w_c3,
                                   relu_backward(t.x_conv4, c4.input), {1, 1},
                                   cascade_pad);
  g.w_c3 = std::move(c3.kernel);
  g.b_c3 = std::move(c3.bias);
  Conv2dGrads c2 = conv2d_backward(t.x_conv2.reshaped({1, d, wp}), w.w_c2,
                                   relu_backward(t.x_conv3, c3.input), {1, 1},
                                   cascade_pad);
  g.w_c2 = std::move(c2.kernel);
  g.b_c2 = std::move(c2.bias);

  // Time convolutions feeding both paths.
  Conv1dGrads content = conv1d_time_backward(t.x_conv1, w.w_p,
                                             c2.input.reshaped({d, wp}));
  g.w_p = std::move(content.kernel);
  g.b_p = std::move(content.bias);
  Conv1dGrads gate = conv1d_time_backward(t.x_conv1, w.w_g, dz);
  g.w_g = std::move(gate.kernel);
  g.b_g = std::move(gate.bias);
  for (std::size_t i = 0; i < dx1.size(); ++i) {
    dx1[i] += content.input[i] + gate.input[i];
  }

  // Doppler embedding, pooling, channel fusion.
  Conv2dGrads embed = conv2d_backward(t.x_ds, w.w_c1, dx1.reshaped({d, 1, wp}),
                                      {1, 1}, {0, 0});
  g.w_c1 = std::move(embed.kernel);
  g.b_c1 = std::move(embed.bias);
  const Tensor dx1_full =
      maxpool2d_backward(t.x1, cfg.pool, cfg.pool, embed.input);
  Conv2dGrads fuse = conv2d_backward(t.input, w.w_c0, dx1_full, {1, 1},
                                     fuse_pad, /*want_input_grad=*/false);
  g.w_c0 = std::move(fuse.kernel);
  g.b_c0 = std::move(fuse.bias);

  if (!std::isfinite(r.loss) || !g.all_finite()) {
    throw NumericError("backward: non-finite loss or gradient");
  }
  return r;
}

BackwardResult backward_sum(const GateCNNConfig& cfg, const ModelWeights& w,
                            std::span<const MicroDopplerFrame> frames,
                            std::span<const std::size_t> indices) {
  BackwardResult total;
  total.grads = Gradients::zeros(cfg);
  for (std::size_t idx : indices) {
    const MicroDopplerFrame& f = frames[idx];
    BackwardResult one = backward(cfg, w, f.data, f.label);
    total.loss += one.loss;
    total.grads += one.grads;
  }
  return total;
}

void sgd_step(ModelWeights& w, const Gradients& g, double learning_rate) {
  auto params = w.tensors();
  const auto grads = g.tensors();
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    auto p = params[i]->data();
    const auto d = grads[i]->data();
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= learning_rate * d[j];
  }
}

}  // namespace gatecnn
