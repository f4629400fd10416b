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

#include "gatecnn/model_io.h"

#include <cmath>

#include "gatecnn/errors.h"

namespace gatecnn {

void write_config(ByteWriter& out, const GateCNNConfig& cfg) {
  for (std::size_t v :
       {cfg.in_channels, cfg.doppler_bins, cfg.time_steps, cfg.fuse_channels,
        cfg.fuse_kernel, cfg.pool.h, cfg.pool.w, cfg.embed_dim, cfg.gate_taps,
        cfg.content_channels, cfg.cascade_kernel, cfg.num_classes}) {
    out.u32(static_cast<std::uint32_t>(v));
  }
}

GateCNNConfig read_config(ByteReader& in) {
  GateCNNConfig cfg;
  for (std::size_t* field :
       {&cfg.in_channels, &cfg.doppler_bins, &cfg.time_steps, &cfg.fuse_channels,
        &cfg.fuse_kernel, &cfg.pool.h, &cfg.pool.w, &cfg.embed_dim,
        &cfg.gate_taps, &cfg.content_channels, &cfg.cascade_kernel,
        &cfg.num_classes}) {
    *field = in.u32();
  }
  try {
    cfg.validate();
  } catch (const ValueError& e) {
    throw FormatError(std::string("stored ") + e.what());
  }
  return cfg;
}

std::string serialize_weights(const GateCNNConfig& cfg, const ModelWeights& w) {
  check_weights(cfg, w);
  ByteWriter out;
  out.bytes("GCNN");
  out.u16(kWeightsFormatVersion);
  write_config(out, cfg);
  const auto slots = w.tensors();
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    const std::string_view name = ModelWeights::names()[i];
    out.u16(static_cast<std::uint16_t>(name.size()));
    out.bytes(name);
    const Shape& shape = slots[i]->shape();
    out.u8(static_cast<std::uint8_t>(shape.size()));
    for (std::size_t e : shape) out.u32(static_cast<std::uint32_t>(e));
    for (double v : slots[i]->data()) out.f64(v);
  }
  return out.release();
}

SavedModel deserialize_weights(std::string_view bytes) {
  ByteReader in(bytes);
  in.expect_magic("GCNN", "GCNN weights");
  const std::uint16_t version = in.u16();
  if (version != kWeightsFormatVersion) {
    throw FormatError("unsupported GCNN version " + std::to_string(version));
  }
  SavedModel m;
  m.config = read_config(in);
  const auto shapes = weight_shapes(m.config);
  auto slots = m.weights.tensors();
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    const std::string_view expected = ModelWeights::names()[i];
    const std::uint16_t name_len = in.u16();
    const std::string_view name = in.bytes(name_len);
    if (name != expected) {
      throw FormatError("tensor " + std::to_string(i) + " is named '" +
                        std::string(name) + "', expected '" +
                        std::string(expected) + "'");
    }
    const std::uint8_t rank = in.u8();
    Shape shape(rank);
    for (auto& e : shape) e = in.u32();
    if (shape != shapes[i]) {
      throw FormatError("tensor '" + std::string(name) + "' has shape " +
                        shape_string(shape) + ", config implies " +
                        shape_string(shapes[i]));
    }
    std::vector<double> data(shape_elements(shape));
    for (double& v : data) {
      v = in.f64();
      if (!std::isfinite(v)) {
        throw FormatError("tensor '" + std::string(name) +
                          "' contains a non-finite value");
      }
    }
    *slots[i] = Tensor(std::move(shape), std::move(data));
  }
  if (!in.at_end()) {
    throw FormatError(std::to_string(in.remaining()) +
                      " trailing bytes after GCNN payload");
  }
  return m;
}

void save_weights(const std::string& path, const GateCNNConfig& cfg,
                  const ModelWeights& w) {
  write_file(path, serialize_weights(cfg, w));
}

SavedModel load_weights(const std::string& path) {
  return deserialize_weights(read_file(path));
}

}  // namespace gatecnn
