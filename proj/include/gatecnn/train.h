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

#ifndef GATECNN_TRAIN_H_
#define GATECNN_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gatecnn/frame.h"
#include "gatecnn/model.h"
#include "gatecnn/ops.h"

namespace gatecnn {

/// d(loss)/d(weight) for every ModelWeights entry, same shapes.
struct Gradients : ModelWeights {
  static Gradients zeros(const GateCNNConfig& cfg) {
    return Gradients{ModelWeights::zeros(cfg)};
  }
  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double scale);
};

// Layer-level backward passes. `grad_out` is d(loss)/d(output).

struct Conv2dGrads {
  Tensor input;   // empty when not requested
  Tensor kernel;
  Tensor bias;
};

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernel,
                            const Tensor& grad_out, Extent2 stride,
                            Extent2 padding, bool want_input_grad = true);

struct Conv1dGrads {
  Tensor input;
  Tensor kernel;
  Tensor bias;
};

Conv1dGrads conv1d_time_backward(const Tensor& input, const Tensor& kernel,
                                 const Tensor& grad_out);

/// Routes each output gradient to the first maximal element of its window
/// (row-major scan), matching maxpool2d.
Tensor maxpool2d_backward(const Tensor& input, Extent2 window, Extent2 stride,
                          const Tensor& grad_out);

/// Passes grad where the ReLU input was > 0; relu'(0) = 0.
Tensor relu_backward(const Tensor& pre_or_post_activation,
                     const Tensor& grad_out);

/// -log softmax(logits)[label], computed with max subtraction. Throws
/// NumericError on non-finite logits and ValueError on a bad label.
double cross_entropy(std::span<const double> logits, std::size_t label);

/// softmax(logits) - onehot(label).
std::vector<double> cross_entropy_grad(std::span<const double> logits,
                                       std::size_t label);

struct BackwardResult {
  double loss = 0.0;
  Gradients grads;
};

/// Exact analytical gradients of the cross-entropy loss of one sample.
BackwardResult backward(const GateCNNConfig& cfg, const ModelWeights& w,
                        const Tensor& input, std::size_t label);

/// Summed loss and gradients over a set of samples, added in index order.
BackwardResult backward_sum(const GateCNNConfig& cfg, const ModelWeights& w,
                            std::span<const MicroDopplerFrame> frames,
                            std::span<const std::size_t> indices);

/// w -= learning_rate * g
void sgd_step(ModelWeights& w, const Gradients& g, double learning_rate);

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 50;
  std::size_t batch_size = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

/// "epoch=<n> loss=<mean loss> accuracy=<fraction>"
std::string format_record(const EpochRecord& r);

struct TrainResult {
  ModelWeights weights;
  std::vector<EpochRecord> history;
};

struct Evaluation {
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const GateCNNConfig& cfg, const ModelWeights& w,
                    std::span<const MicroDopplerFrame> frames);

/// Mini-batch SGD from init_weights(cfg, tc.seed). Each epoch visits the data
/// in a seeded shuffled order, steps on the batch-mean gradient, then records
/// loss and accuracy of the updated weights over the whole set.
TrainResult train(const GateCNNConfig& cfg,
                  std::span<const MicroDopplerFrame> data,
                  const TrainConfig& tc);

/// Same as above but starting from the given weights.
TrainResult train(const GateCNNConfig& cfg, ModelWeights initial,
                  std::span<const MicroDopplerFrame> data,
                  const TrainConfig& tc);

}  // namespace gatecnn

#endif  // GATECNN_TRAIN_H_
