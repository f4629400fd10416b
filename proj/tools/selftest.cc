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

#include "selftest.h"

#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "gatecnn/dataflow.h"
#include "gatecnn/model.h"
#include "gatecnn/ops.h"
#include "gatecnn/oracle.h"
#include "gatecnn/quant.h"
#include "gatecnn/random.h"
#include "gatecnn/rom.h"
#include "gatecnn/train.h"

namespace gatecnn::tools {
namespace {

Tensor random_tensor(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

GateCNNConfig small_config() {
  GateCNNConfig cfg;
  cfg.doppler_bins = 8;
  cfg.time_steps = 8;
  cfg.fuse_channels = 2;
  cfg.embed_dim = 2;
  cfg.content_channels = 2;
  cfg.num_classes = 3;
  return cfg;
}

bool conv_oracles() {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t c = 1 + rng.below(3), h = 3 + rng.below(5), w = 3 + rng.below(5);
    const Tensor x = random_tensor({c, h, w}, rng);
    const Tensor k = random_tensor({2, c, 3, 3}, rng);
    if (conv2d(x, k, {}, {1, 1}, {1, 1}) != oracle::conv2d(x, k, {}, 1, 1, 1, 1))
      return false;
    const Tensor x2 = x.reshaped({c, h * w});
    const Tensor k1 = random_tensor({c, 3}, rng);
    if (conv1d_time(x2, k1, {}) != oracle::conv1d_time(x2, k1, {})) return false;
    if (maxpool2d(x, {2, 2}) != oracle::maxpool2d(x, 2, 2)) return false;
  }
  return true;
}

bool gating_residual() {
  const GateCNNConfig cfg;
  Rng rng(2);
  ModelWeights w = init_weights(cfg, 2);
  const Tensor x = random_tensor(cfg.input_shape(), rng);
  const ForwardTrace t = forward(cfg, w, x);
  for (std::size_t i = 0; i < t.y.size(); ++i) {
    if (t.y[i] != t.x_conv5[i] * std::max(t.z[i], 0.0) + t.x_conv1[i]) return false;
  }
  w.w_c4.fill(0.0);
  w.b_c4.fill(0.0);
  return forward(cfg, w, x).y == t.x_conv1;
}

bool gradient_check() {
  const GateCNNConfig cfg = small_config();
  const ModelWeights w = init_weights(cfg, 3);
  Rng rng(3);
  Tensor x(cfg.input_shape());
  for (double& v : x.data()) v = rng.uniform();
  const BackwardResult b = backward(cfg, w, x, 1);
  const ModelWeights fd = oracle::finite_difference_gradients(cfg, w, x, 1);
  const auto ga = b.grads.tensors();
  const auto gf = fd.tensors();
  for (std::size_t t = 0; t < ga.size(); ++t) {
    for (std::size_t i = 0; i < ga[t]->size(); ++i) {
      if (oracle::relative_error((*ga[t])[i], (*gf[t])[i]) >= 1e-4) return false;
    }
  }
  return true;
}

bool counting() {
  const GateCNNConfig cfg;
  const ModelWeights w = init_weights(cfg, 4);
  const oracle::CountedForward counted =
      oracle::counted_forward(cfg, w, Tensor(cfg.input_shape(), 0.5));
  return param_count(cfg) == oracle::enumerate_params(cfg) &&
         flop_count(cfg) == counted.flops();
}

bool rom_round_trip() {
  const GateCNNConfig cfg;
  const QuantizedModel qm = quantize_model(cfg, init_weights(cfg, 5));
  return parse_rom(export_rom(qm)).same_codes(qm) &&
         deserialize_quantized(serialize_quantized(qm)).same_codes(qm);
}

bool pipeline() {
  PipelineReport r;
  r.stages.push_back({"reference", 0, 0, kReferenceLatencyCycles,
                      kReferenceLatencyCycles});
  r.total_latency_cycles = kReferenceLatencyCycles;
  finalize_report(r);
  const PipelineReport d = estimate(GateCNNConfig{});
  return std::fabs(r.latency_seconds - 107.5e-6) < 1e-15 &&
         std::round(r.throughput_inf_per_s / 100.0) == 93.0 && d.realtime_ok;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"conv_oracles", conv_oracles},   {"gating_residual", gating_residual},
      {"gradient_check", gradient_check}, {"counting", counting},
      {"rom_round_trip", rom_round_trip}, {"pipeline", pipeline},
  };
  bool all = true;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      out << "selftest " << name << " error: " << e.what() << "\n";
    }
    out << "selftest " << name << (ok ? " PASS" : " FAIL") << "\n";
    all = all && ok;
  }
  return all;
}

}  // namespace gatecnn::tools
