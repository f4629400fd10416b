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

#include "gatecnn/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gatecnn/errors.h"

namespace gatecnn {
namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty() || shape.size() > Tensor::kMaxRank) {
    throw DimensionError("tensor rank must be in [1, 4], got " +
                         std::to_string(shape.size()));
  }
  for (std::size_t axis = 0; axis < shape.size(); ++axis) {
    if (shape[axis] == 0) {
      throw DimensionError("tensor axis " + std::to_string(axis) +
                           " has zero extent");
    }
  }
}

}  // namespace

std::size_t shape_elements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_elements(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (shape_elements(shape_) != data_.size()) {
    throw DimensionError("tensor of shape " + shape_string(shape_) +
                         " needs " + std::to_string(shape_elements(shape_)) +
                         " elements, got " + std::to_string(data_.size()));
  }
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for rank " +
                         std::to_string(shape_.size()));
  }
  return shape_[axis];
}

Tensor Tensor::reshaped(Shape shape) const {
  validate_shape(shape);
  if (shape_elements(shape) != data_.size()) {
    throw DimensionError("cannot reshape " + shape_string(shape_) + " to " +
                         shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

}  // namespace gatecnn
