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

#include "gatecnn/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gatecnn::oracle {
namespace {

Tensor pad_hw(const Tensor& input, std::size_t pad_h, std::size_t pad_w) {
  const std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  Tensor out({c, h + 2 * pad_h, w + 2 * pad_w});
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x)
        out.at(i, y + pad_h, x + pad_w) = input.at(i, y, x);
  return out;
}

// Same-stride-1 convolution with bounds checks instead of a padded copy, so
// that every counted MAC touches a real input element.
Tensor counting_conv2d(const Tensor& in, const Tensor& k,
                       const Tensor& bias, std::size_t pad,
                       std::uint64_t& macs) {
  const long ch = static_cast<long>(in.dim(0)), h = static_cast<long>(in.dim(1)),
             w = static_cast<long>(in.dim(2));
  const long oc = static_cast<long>(k.dim(0)), kh = static_cast<long>(k.dim(2)),
             kw = static_cast<long>(k.dim(3));
  const long p = static_cast<long>(pad);
  const long oh = h + 2 * p - kh + 1, ow = w + 2 * p - kw + 1;
  Tensor out({static_cast<std::size_t>(oc), static_cast<std::size_t>(oh),
              static_cast<std::size_t>(ow)});
  for (long o = 0; o < oc; ++o)
    for (long y = 0; y < oh; ++y)
      for (long x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (long c = 0; c < ch; ++c)
          for (long i = 0; i < kh; ++i)
            for (long j = 0; j < kw; ++j) {
              const long iy = y + i - p, ix = x + j - p;
              if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
              acc += k.at(o, c, i, j) * in.at(c, iy, ix);
              ++macs;
            }
        out.at(o, y, x) = acc + bias[static_cast<std::size_t>(o)];
      }
  return out;
}

Tensor counting_time_conv(const Tensor& in, const Tensor& k, const Tensor& bias,
                          std::uint64_t& macs) {
  const long d = static_cast<long>(in.dim(0)), len = static_cast<long>(in.dim(1));
  const long taps = static_cast<long>(k.dim(1)), half = taps / 2;
  Tensor out(in.shape());
  for (long c = 0; c < d; ++c)
    for (long t = 0; t < len; ++t) {
      double acc = 0.0;
      for (long j = 0; j < taps; ++j) {
        const long s = t + j - half;
        if (s < 0 || s >= len) continue;
        acc += k.at(c, j) * in.at(c, s);
        ++macs;
      }
      out.at(c, t) = acc + bias[static_cast<std::size_t>(c)];
    }
  return out;
}

void counting_relu(Tensor& t, std::uint64_t& ops) {
  for (double& v : t.data()) {
    v = v > 0.0 ? v : 0.0;
    ++ops;
  }
}

double loss_of(const GateCNNConfig& cfg, const ModelWeights& w,
               const Tensor& input, std::size_t label) {
  const ForwardTrace t = forward(cfg, w, input);
  const auto logits = t.logits.data();
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : logits) peak = std::max(peak, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - peak);
  return std::log(sum) + peak - logits[label];
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel,
              std::span<const double> bias, std::size_t stride_h,
              std::size_t stride_w, std::size_t pad_h, std::size_t pad_w) {
  const Tensor padded = pad_hw(input, pad_h, pad_w);
  const std::size_t channels = input.dim(0);
  const std::size_t out_ch = kernel.dim(0), kh = kernel.dim(2), kw = kernel.dim(3);
  const std::size_t out_h = (padded.dim(1) - kh) / stride_h + 1;
  const std::size_t out_w = (padded.dim(2) - kw) / stride_w + 1;
  Tensor out({out_ch, out_h, out_w});
  for (std::size_t o = 0; o < out_ch; ++o)
    for (std::size_t y = 0; y < out_h; ++y)
      for (std::size_t x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c)
          for (std::size_t i = 0; i < kh; ++i)
            for (std::size_t j = 0; j < kw; ++j)
              acc += kernel.at(o, c, i, j) *
                     padded.at(c, y * stride_h + i, x * stride_w + j);
        out.at(o, y, x) = acc + (bias.empty() ? 0.0 : bias[o]);
      }
  return out;
}

Tensor conv1d_time(const Tensor& input, const Tensor& kernel,
                   std::span<const double> bias) {
  const std::size_t d = input.dim(0), len = input.dim(1), taps = kernel.dim(1);
  const std::size_t half = taps / 2;
  std::vector<double> padded(len + 2 * half);
  Tensor out({d, len});
  for (std::size_t c = 0; c < d; ++c) {
    std::fill(padded.begin(), padded.end(), 0.0);
    for (std::size_t t = 0; t < len; ++t) padded[t + half] = input.at(c, t);
    for (std::size_t t = 0; t < len; ++t) {
      double acc = 0.0;
      for (std::size_t j = 0; j < taps; ++j) acc += kernel.at(c, j) * padded[t + j];
      out.at(c, t) = acc + (bias.empty() ? 0.0 : bias[c]);
    }
  }
  return out;
}

Tensor maxpool2d(const Tensor& input, std::size_t window_h,
                 std::size_t window_w) {
  const std::size_t c = input.dim(0);
  const std::size_t oh = input.dim(1) / window_h, ow = input.dim(2) / window_w;
  Tensor out({c, oh, ow});
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < window_h; ++a)
          for (std::size_t b = 0; b < window_w; ++b)
            best = std::max(best, input.at(i, y * window_h + a, x * window_w + b));
        out.at(i, y, x) = best;
      }
  return out;
}

std::uint64_t enumerate_params(const GateCNNConfig& cfg) {
  const std::uint64_t c0 = cfg.in_channels, c1 = cfg.fuse_channels;
  const std::uint64_t kf = cfg.fuse_kernel, kc = cfg.cascade_kernel;
  const std::uint64_t d = cfg.embed_dim, k = cfg.content_channels;
  const std::uint64_t hp = cfg.doppler_bins / cfg.pool.h;
  const std::uint64_t wp = cfg.time_steps / cfg.pool.w;
  const std::uint64_t n = cfg.num_classes, kt = cfg.gate_taps;
  std::uint64_t total = 0;
  total += c1 * c0 * kf * kf + c1;  // channel fusion
  total += d * c1 * hp + d;         // Doppler embedding
  total += d * kt + d;              // gate
  total += d * kt + d;              // content
  total += k * kc * kc + k;         // cascade 1 (1 -> K)
  total += k * k * kc * kc + k;     // cascade 2 (K -> K)
  total += k * kc * kc + 1;         // cascade 3 (K -> 1)
  total += d + 1;                   // averaging
  total += n * wp + n;              // classifier
  return total;
}

CountedForward counted_forward(const GateCNNConfig& cfg, const ModelWeights& w,
                               const Tensor& input) {
  CountedForward r;
  const std::size_t d = cfg.embed_dim, wp = cfg.time_steps / cfg.pool.w;

  const Tensor x1 = counting_conv2d(input, w.w_c0, w.b_c0, cfg.fuse_kernel / 2, r.macs);
  const Tensor xds = maxpool2d(x1, cfg.pool.h, cfg.pool.w);
  const Tensor xc1 = counting_conv2d(xds, w.w_c1, w.b_c1, 0, r.macs).reshaped({d, wp});
  const Tensor z = counting_time_conv(xc1, w.w_g, w.b_g, r.macs);
  const Tensor xc2 = counting_time_conv(xc1, w.w_p, w.b_p, r.macs);
  const std::size_t pad = cfg.cascade_kernel / 2;
  Tensor xc3 = counting_conv2d(xc2.reshaped({1, d, wp}), w.w_c2, w.b_c2, pad, r.macs);
  counting_relu(xc3, r.elementwise);
  Tensor xc4 = counting_conv2d(xc3, w.w_c3, w.b_c3, pad, r.macs);
  counting_relu(xc4, r.elementwise);
  const Tensor xc5 = counting_conv2d(xc4, w.w_c4, w.b_c4, pad, r.macs);

  Tensor y({1, d, wp});
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double gate = z[i] > 0.0 ? z[i] : 0.0;
    ++r.elementwise;  // relu
    const double gated = xc5[i] * gate;
    ++r.elementwise;  // multiply
    y[i] = gated + xc1[i];
    ++r.elementwise;  // residual add
  }
  const Tensor v = counting_conv2d(y, w.w_avg, w.b_avg, 0, r.macs);

  r.logits.assign(cfg.num_classes, 0.0);
  for (std::size_t n = 0; n < cfg.num_classes; ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < wp; ++j) {
      acc += w.w_cls.at(n, j) * v[j];
      ++r.macs;
    }
    r.logits[n] = acc + w.b_cls[n];
  }
  return r;
}

ModelWeights finite_difference_gradients(const GateCNNConfig& cfg,
                                         const ModelWeights& w,
                                         const Tensor& input, std::size_t label,
                                         double eps) {
  ModelWeights probe = w;
  ModelWeights grads = ModelWeights::zeros(cfg);
  auto params = probe.tensors();
  auto out = grads.tensors();
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    auto p = params[i]->data();
    auto g = out[i]->data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double saved = p[j];
      p[j] = saved + eps;
      const double up = loss_of(cfg, probe, input, label);
      p[j] = saved - eps;
      const double down = loss_of(cfg, probe, input, label);
      p[j] = saved;
      g[j] = (up - down) / (2.0 * eps);
    }
  }
  return grads;
}

double nearest_centroid_accuracy(std::span<const MicroDopplerFrame> train,
                                 std::span<const MicroDopplerFrame> test) {
  std::map<std::size_t, std::vector<double>> sums;
  std::map<std::size_t, std::size_t> counts;
  for (const MicroDopplerFrame& f : train) {
    auto& s = sums[f.label];
    if (s.empty()) s.assign(f.data.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += f.data[i];
    ++counts[f.label];
  }
  for (auto& [label, s] : sums) {
    for (double& v : s) v /= static_cast<double>(counts[label]);
  }
  std::size_t correct = 0;
  for (const MicroDopplerFrame& f : test) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_label = 0;
    for (const auto& [label, c] : sums) {
      double dist = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double diff = f.data[i] - c[i];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        best_label = label;
      }
    }
    if (best_label == f.label) ++correct;
  }
  return test.empty() ? 0.0
                      : static_cast<double>(correct) / static_cast<double>(test.size());
}

double relative_error(double a, double b, double floor) {
  const double scale = std::max({std::fabs(a), std::fabs(b), floor});
  return std::fabs(a - b) / scale;
}

}  // namespace gatecnn::oracle
