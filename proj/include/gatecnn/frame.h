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

#ifndef GATECNN_FRAME_H_
#define GATECNN_FRAME_H_

#include <cstddef>
#include <cstdint>

#include "gatecnn/tensor.h"

namespace gatecnn {

/// Generator parameters a frame was rendered with. Not persisted in MDFR
/// files; frames loaded from disk carry default meta.
struct FrameMeta {
  std::uint64_t seed = 0;
  double center_offset = 0.0;
  double phase = 0.0;
};

/// One (channels x Doppler bins x time steps) spectrogram with its label.
struct MicroDopplerFrame {
  Tensor data;
  std::size_t label = 0;
  FrameMeta meta;
};

}  // namespace gatecnn

#endif  // GATECNN_FRAME_H_
