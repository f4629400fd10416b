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

// GCNN weight files.
//
//   "GCNN"                 4 bytes magic
//   version                u16 (currently 1)
//   config                 12 x u32: in_channels, doppler_bins, time_steps,
//                          fuse_channels, fuse_kernel, pool_h, pool_w,
//                          embed_dim, gate_taps, content_channels,
//                          cascade_kernel, num_classes
//   18 tensors, in ModelWeights::names() order, each:
//     name_length u16, name bytes, extent_count u8, extents u32 each,
//     payload float64 (IEEE-754 little-endian), row-major
//
// All integers are little-endian.

#ifndef GATECNN_MODEL_IO_H_
#define GATECNN_MODEL_IO_H_

#include <string>
#include <string_view>

#include "gatecnn/binary_io.h"
#include "gatecnn/model.h"

namespace gatecnn {

inline constexpr std::uint16_t kWeightsFormatVersion = 1;

struct SavedModel {
  GateCNNConfig config;
  ModelWeights weights;
};

void write_config(ByteWriter& out, const GateCNNConfig& cfg);
GateCNNConfig read_config(ByteReader& in);

std::string serialize_weights(const GateCNNConfig& cfg, const ModelWeights& w);
SavedModel deserialize_weights(std::string_view bytes);

void save_weights(const std::string& path, const GateCNNConfig& cfg,
                  const ModelWeights& w);
SavedModel load_weights(const std::string& path);

}  // namespace gatecnn

#endif  // GATECNN_MODEL_IO_H_
