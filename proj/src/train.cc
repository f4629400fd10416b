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
#include <cstdio>
#include <numeric>

#include "gatecnn/errors.h"
#include "gatecnn/random.h"
#include "gatecnn/train.h"

namespace gatecnn {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValueError("learning_rate must be finite and >= 0");
  }
  if (epochs == 0) throw ValueError("epochs must be >= 1");
  if (batch_size == 0) throw ValueError("batch_size must be >= 1");
}

std::string format_record(const EpochRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "epoch=%zu loss=%.6f accuracy=%.4f", r.epoch,
                r.mean_loss, r.accuracy);
  return buf;
}

Evaluation evaluate(const GateCNNConfig& cfg, const ModelWeights& w,
                    std::span<const MicroDopplerFrame> frames) {
  if (frames.empty()) throw ValueError("evaluate: no frames");
  double loss = 0.0;
  std::size_t correct = 0;
  for (const MicroDopplerFrame& f : frames) {
    const ForwardTrace t = forward(cfg, w, f.data);
    loss += cross_entropy(t.logits.data(), f.label);
    if (argmax(t.logits.data()) == f.label) ++correct;
  }
  const double n = static_cast<double>(frames.size());
  return {loss / n, static_cast<double>(correct) / n};
}

TrainResult train(const GateCNNConfig& cfg,
                  std::span<const MicroDopplerFrame> data,
                  const TrainConfig& tc) {
  return train(cfg, init_weights(cfg, tc.seed), data, tc);
}

TrainResult train(const GateCNNConfig& cfg, ModelWeights initial,
                  std::span<const MicroDopplerFrame> data,
                  const TrainConfig& tc) {
  cfg.validate();
  tc.validate();
  if (data.empty()) throw ValueError("train: empty dataset");
  for (const MicroDopplerFrame& f : data) {
    if (f.label >= cfg.num_classes) {
      throw ValueError("train: label " + std::to_string(f.label) +
                       " >= num_classes " + std::to_string(cfg.num_classes));
    }
  }

  TrainResult result{std::move(initial), {}};
  ModelWeights& w = result.weights;
  check_weights(cfg, w);

  // Separate stream from init_weights so the shuffle does not alias weights.
  Rng shuffle_rng(tc.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t end = std::min(order.size(), start + tc.batch_size);
      const std::span<const std::size_t> batch(order.data() + start,
                                               end - start);
      BackwardResult step = backward_sum(cfg, w, data, batch);
      step.grads *= 1.0 / static_cast<double>(batch.size());
      sgd_step(w, step.grads, tc.learning_rate);
    }
    const Evaluation e = evaluate(cfg, w, data);
    result.history.push_back({epoch, e.mean_loss, e.accuracy});
  }
  return result;
}

}  // namespace gatecnn
