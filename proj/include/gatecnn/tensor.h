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

#ifndef GATECNN_TENSOR_H_
#define GATECNN_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gatecnn {

using Shape = std::vector<std::size_t>;

/// Dense row-major float64 tensor of rank 1 to 4.
///
/// Activations use rank 3 (channel, Doppler, time) or rank 2 (channel, time);
/// convolution kernels use rank 4 (out, in, kh, kw). The last axis is
/// contiguous: element (c, h, w) lives at data[(c * H + h) * W + w].
class Tensor {
 public:
  static constexpr std::size_t kMaxRank = 4;

  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Zeros(Shape shape) { return Tensor(std::move(shape), 0.0); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Unchecked multi-index accessors; rank must match the call.
  double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }
  double& at(std::size_t c, std::size_t h, std::size_t w) {
    return data_[(c * shape_[1] + h) * shape_[2] + w];
  }
  double at(std::size_t c, std::size_t h, std::size_t w) const {
    return data_[(c * shape_[1] + h) * shape_[2] + w];
  }
  double& at(std::size_t o, std::size_t i, std::size_t h, std::size_t w) {
    return data_[((o * shape_[1] + i) * shape_[2] + h) * shape_[3] + w];
  }
  double at(std::size_t o, std::size_t i, std::size_t h, std::size_t w) const {
    return data_[((o * shape_[1] + i) * shape_[2] + h) * shape_[3] + w];
  }

  /// Same data under a new shape with the same element count.
  Tensor reshaped(Shape shape) const;

  bool all_finite() const;
  void fill(double value);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

std::size_t shape_elements(const Shape& shape);
std::string shape_string(const Shape& shape);

}  // namespace gatecnn

#endif  // GATECNN_TENSOR_H_
