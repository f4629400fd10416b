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

#include "gatecnn/model.h"

#include <cmath>
#include <sstream>

#include "gatecnn/errors.h"
#include "gatecnn/random.h"

namespace gatecnn {
namespace {

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const DimensionError& e) {
    throw DimensionError(std::string("forward: ") + stage + " stage: " +
                         e.what());
  }
}

// Number of (output position, kernel tap) pairs along one axis whose input
// index lands inside [0, n) for a stride-1 window with symmetric padding.
std::uint64_t valid_taps(std::size_t n, std::size_t kernel, std::size_t pad) {
  const std::size_t out = conv_output_extent(n, kernel, 1, pad);
  std::uint64_t count = 0;
  for (std::size_t k = 0; k < kernel; ++k) {
    // Input index for output o is o + k - pad; count o with it in range.
    const std::ptrdiff_t shift =
        static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(pad);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(out),
        static_cast<std::ptrdiff_t>(n) - shift);
    if (hi > lo) count += static_cast<std::uint64_t>(hi - lo);
  }
  return count;
}

void require_shape(const char* what, const Tensor& t, const Shape& expected) {
  if (t.shape() != expected) {
    throw DimensionError(std::string(what) + " has shape " +
                         shape_string(t.shape()) + ", expected " +
                         shape_string(expected));
  }
}

}  // namespace

void GateCNNConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValueError("config: " + msg); };
  if (in_channels == 0) fail("in_channels must be >= 1");
  if (doppler_bins == 0 || time_steps == 0) fail("input extents must be >= 1");
  if (fuse_channels == 0) fail("fuse_channels must be >= 1");
  if (fuse_kernel % 2 == 0) fail("fuse_kernel must be odd");
  if (pool.h == 0 || pool.w == 0) fail("pool window must be >= 1");
  if (doppler_bins % pool.h != 0) {
    fail("doppler_bins " + std::to_string(doppler_bins) +
         " not divisible by pool height " + std::to_string(pool.h));
  }
  if (time_steps % pool.w != 0) {
    fail("time_steps " + std::to_string(time_steps) +
         " not divisible by pool width " + std::to_string(pool.w));
  }
  if (embed_dim == 0) fail("embed_dim must be >= 1");
  if (gate_taps % 2 == 0) fail("gate_taps must be odd");
  if (content_channels == 0) fail("content_channels must be >= 1");
  if (cascade_kernel % 2 == 0) fail("cascade_kernel must be odd");
  if (num_classes < 2) fail("num_classes must be >= 2");
}

std::string describe(const GateCNNConfig& cfg) {
  std::ostringstream os;
  os << "in_channels=" << cfg.in_channels << " doppler_bins=" << cfg.doppler_bins
     << " time_steps=" << cfg.time_steps << " fuse_channels=" << cfg.fuse_channels
     << " fuse_kernel=" << cfg.fuse_kernel << " pool=" << cfg.pool.h << "x"
     << cfg.pool.w << " embed_dim=" << cfg.embed_dim
     << " gate_taps=" << cfg.gate_taps
     << " content_channels=" << cfg.content_channels
     << " cascade_kernel=" << cfg.cascade_kernel
     << " num_classes=" << cfg.num_classes;
  return os.str();
}

const std::array<std::string_view, ModelWeights::kTensorCount>&
ModelWeights::names() {
  static const std::array<std::string_view, kTensorCount> kNames = {
      "w_c0", "b_c0", "w_c1", "b_c1", "w_g",   "b_g",   "w_p",   "b_p",
      "w_c2", "b_c2", "w_c3", "b_c3", "w_c4",  "b_c4",  "w_avg", "b_avg",
      "w_cls", "b_cls"};
  return kNames;
}

std::array<Tensor*, ModelWeights::kTensorCount> ModelWeights::tensors() {
  return {&w_c0, &b_c0, &w_c1, &b_c1, &w_g,   &b_g,   &w_p,   &b_p,   &w_c2,
          &b_c2, &w_c3, &b_c3, &w_c4, &b_c4, &w_avg, &b_avg, &w_cls, &b_cls};
}

std::array<const Tensor*, ModelWeights::kTensorCount> ModelWeights::tensors()
    const {
  return {&w_c0, &b_c0, &w_c1, &b_c1, &w_g,   &b_g,   &w_p,   &b_p,   &w_c2,
          &b_c2, &w_c3, &b_c3, &w_c4, &b_c4, &w_avg, &b_avg, &w_cls, &b_cls};
}

std::array<Shape, ModelWeights::kTensorCount> weight_shapes(
    const GateCNNConfig& cfg) {
  const std::size_t c0 = cfg.in_channels, c1 = cfg.fuse_channels;
  const std::size_t kf = cfg.fuse_kernel, kc = cfg.cascade_kernel;
  const std::size_t d = cfg.embed_dim, k = cfg.content_channels;
  const std::size_t hp = cfg.pooled_height(), wp = cfg.pooled_width();
  return {Shape{c1, c0, kf, kf},    Shape{c1},
          Shape{d, c1, hp, 1},      Shape{d},
          Shape{d, cfg.gate_taps},  Shape{d},
          Shape{d, cfg.gate_taps},  Shape{d},
          Shape{k, 1, kc, kc},      Shape{k},
          Shape{k, k, kc, kc},      Shape{k},
          Shape{1, k, kc, kc},      Shape{1},
          Shape{1, 1, d, 1},        Shape{1},
          Shape{cfg.num_classes, wp}, Shape{cfg.num_classes}};
}

ModelWeights ModelWeights::zeros(const GateCNNConfig& cfg) {
  cfg.validate();
  ModelWeights w;
  const auto shapes = weight_shapes(cfg);
  auto slots = w.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) *slots[i] = Tensor(shapes[i]);
  return w;
}

std::size_t ModelWeights::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : tensors()) n += t->size();
  return n;
}

bool ModelWeights::all_finite() const {
  for (const Tensor* t : tensors()) {
    if (!t->all_finite()) return false;
  }
  return true;
}

void check_weights(const GateCNNConfig& cfg, const ModelWeights& w) {
  const auto shapes = weight_shapes(cfg);
  const auto slots = w.tensors();
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    require_shape(std::string(ModelWeights::names()[i]).c_str(), *slots[i],
                  shapes[i]);
  }
}

ForwardTrace forward(const GateCNNConfig& cfg, const ModelWeights& w,
                     const Tensor& input) {
  cfg.validate();
  check_weights(cfg, w);
  const std::size_t d = cfg.embed_dim, wp = cfg.pooled_width();
  const std::size_t fuse_pad = cfg.fuse_kernel / 2;
  const std::size_t cascade_pad = cfg.cascade_kernel / 2;

  ForwardTrace t;
  t.input = input;
  run_stage("input", [&] {
    require_shape("input", input, cfg.input_shape());
    return 0;
  });
  t.x1 = run_stage("channel fusion", [&] {
    return conv2d(input, w.w_c0, w.b_c0.data(), {1, 1}, {fuse_pad, fuse_pad});
  });
  t.x_ds = run_stage("downsampling", [&] { return maxpool2d(t.x1, cfg.pool); });
  t.x_conv1 = run_stage("doppler embedding", [&] {
    return conv2d(t.x_ds, w.w_c1, w.b_c1.data()).reshaped({d, wp});
  });
  t.z = run_stage("gate path",
                  [&] { return conv1d_time(t.x_conv1, w.w_g, w.b_g.data()); });
  t.x_conv2 = run_stage("content path", [&] {
    return conv1d_time(t.x_conv1, w.w_p, w.b_p.data());
  });
  t.x_conv3 = run_stage("cascade 1", [&] {
    return relu(conv2d(t.x_conv2.reshaped({1, d, wp}), w.w_c2, w.b_c2.data(),
                       {1, 1}, {cascade_pad, cascade_pad}));
  });
  t.x_conv4 = run_stage("cascade 2", [&] {
    return relu(conv2d(t.x_conv3, w.w_c3, w.b_c3.data(), {1, 1},
                       {cascade_pad, cascade_pad}));
  });
  t.x_conv5 = run_stage("cascade 3", [&] {
    return conv2d(t.x_conv4, w.w_c4, w.b_c4.data(), {1, 1},
                  {cascade_pad, cascade_pad})
        .reshaped({d, wp});
  });

  t.y = Tensor({d, wp});
  for (std::size_t i = 0; i < t.y.size(); ++i) {
    const double gate = t.z[i] > 0.0 ? t.z[i] : 0.0;
    t.y[i] = t.x_conv5[i] * gate + t.x_conv1[i];
  }

  t.v = run_stage("averaging", [&] {
    return conv2d(t.y.reshaped({1, d, wp}), w.w_avg, w.b_avg.data())
        .reshaped({wp});
  });

  const std::size_t classes = cfg.num_classes;
  t.logits = Tensor({classes});
  for (std::size_t n = 0; n < classes; ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < wp; ++j) acc += w.w_cls.at(n, j) * t.v[j];
    t.logits[n] = acc + w.b_cls[n];
  }
  return t;
}

std::size_t argmax(std::span<const double> logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

std::size_t predict(const GateCNNConfig& cfg, const ModelWeights& w,
                    const Tensor& input) {
  return argmax(forward(cfg, w, input).logits.data());
}

std::array<std::size_t, ModelWeights::kTensorCount> fan_ins(
    const GateCNNConfig& cfg) {
  const std::size_t kc2 = cfg.cascade_kernel * cfg.cascade_kernel;
  const std::size_t f0 = cfg.in_channels * cfg.fuse_kernel * cfg.fuse_kernel;
  const std::size_t f1 = cfg.fuse_channels * cfg.pooled_height();
  const std::size_t ft = cfg.gate_taps;
  const std::size_t f2 = kc2;
  const std::size_t f3 = cfg.content_channels * kc2;
  const std::size_t fc = cfg.pooled_width();
  return {f0, f0, f1, f1, ft, ft, ft, ft, f2, f2, f3, f3, f3, f3, 0, 0, fc, fc};
}

ModelWeights init_weights(const GateCNNConfig& cfg, std::uint64_t seed) {
  ModelWeights w = ModelWeights::zeros(cfg);
  const auto fans = fan_ins(cfg);
  auto slots = w.tensors();
  Rng rng(seed);
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    if (fans[i] == 0) continue;
    const double bound = std::sqrt(1.0 / static_cast<double>(fans[i]));
    for (double& v : slots[i]->data()) v = rng.uniform(-bound, bound);
  }
  w.w_avg.fill(1.0 / static_cast<double>(cfg.embed_dim));
  w.b_avg.fill(0.0);
  return w;
}

std::vector<StageWork> stage_work(const GateCNNConfig& cfg) {
  cfg.validate();
  const std::uint64_t c0 = cfg.in_channels, c1 = cfg.fuse_channels;
  const std::uint64_t d = cfg.embed_dim, k = cfg.content_channels;
  const std::uint64_t hp = cfg.pooled_height(), wp = cfg.pooled_width();
  const std::uint64_t map = d * wp;
  const std::size_t fpad = cfg.fuse_kernel / 2, cpad = cfg.cascade_kernel / 2;

  const std::uint64_t fuse_taps =
      valid_taps(cfg.doppler_bins, cfg.fuse_kernel, fpad) *
      valid_taps(cfg.time_steps, cfg.fuse_kernel, fpad);
  const std::uint64_t time_taps = valid_taps(wp, cfg.gate_taps, cfg.gate_taps / 2);
  const std::uint64_t cascade_taps = valid_taps(cfg.embed_dim, cfg.cascade_kernel, cpad) *
                                     valid_taps(wp, cfg.cascade_kernel, cpad);
  const std::uint64_t pool_window = cfg.pool.h * cfg.pool.w;

  std::vector<StageWork> stages;
  stages.push_back({"fuse", c1 * c0 * fuse_taps, 0, 0});
  stages.push_back({"pool", 0, 0, c1 * hp * wp * (pool_window - 1)});
  stages.push_back({"embed", d * c1 * hp * wp, 0, 0});
  stages.push_back({"gate", d * time_taps, 0, 0});
  stages.push_back({"content", d * time_taps, 0, 0});
  stages.push_back({"cascade1", k * cascade_taps, k * map, 0});
  stages.push_back({"cascade2", k * k * cascade_taps, k * map, 0});
  stages.push_back({"cascade3", k * cascade_taps, 0, 0});
  // relu(z), gating multiply, residual add.
  stages.push_back({"combine", 0, 3 * map, 0});
  stages.push_back({"average", d * wp, 0, 0});
  stages.push_back({"classify", cfg.num_classes * wp, 0, 0});
  return stages;
}

std::uint64_t param_count(const GateCNNConfig& cfg) {
  cfg.validate();
  std::uint64_t total = 0;
  for (const Shape& s : weight_shapes(cfg)) total += shape_elements(s);
  return total;
}

std::uint64_t flop_count(const GateCNNConfig& cfg) {
  std::uint64_t flops = 0;
  for (const StageWork& s : stage_work(cfg)) flops += 2 * s.macs + s.elementwise;
  return flops;
}

}  // namespace gatecnn
