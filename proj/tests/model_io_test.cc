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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "gatecnn/errors.h"

namespace gatecnn {
namespace {

TEST(WeightsFormatTest, RoundTripsBitExactly) {
  const GateCNNConfig cfg;
  const ModelWeights w = init_weights(cfg, 12);
  const std::string bytes = serialize_weights(cfg, w);
  const SavedModel m = deserialize_weights(bytes);
  EXPECT_EQ(m.config, cfg);
  EXPECT_EQ(m.weights, w);
  EXPECT_EQ(serialize_weights(m.config, m.weights), bytes);
}

TEST(WeightsFormatTest, HeaderLayout) {
  const GateCNNConfig cfg;
  const std::string bytes = serialize_weights(cfg, ModelWeights::zeros(cfg));
  ASSERT_GE(bytes.size(), 6u + 48u);
  EXPECT_EQ(bytes.substr(0, 4), "GCNN");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 0);
  // doppler_bins is the second u32 of the config block.
  EXPECT_EQ(static_cast<unsigned char>(bytes[10]), 30);
  // Every tensor: u16 name length + name + u8 rank + 4 bytes per extent + 8
  // bytes per value.
  std::size_t expected = 4 + 2 + 12 * 4;
  const auto shapes = weight_shapes(cfg);
  for (std::size_t t = 0; t < shapes.size(); ++t) {
    expected += 2 + ModelWeights::names()[t].size() + 1 + 4 * shapes[t].size() +
                8 * shape_elements(shapes[t]);
  }
  EXPECT_EQ(bytes.size(), expected);
}

TEST(WeightsFormatTest, FloatsAreLittleEndianIeee) {
  const GateCNNConfig cfg;
  ModelWeights w = ModelWeights::zeros(cfg);
  w.w_c0[0] = 1.0;
  const std::string bytes = serialize_weights(cfg, w);
  const std::size_t offset = 4 + 2 + 48 + 2 + 4 + 1 + 16;
  const unsigned char one[8] = {0, 0, 0, 0, 0, 0, 0xf0, 0x3f};
  EXPECT_EQ(std::memcmp(bytes.data() + offset, one, 8), 0);
}

TEST(WeightsFormatTest, RejectsCorruption) {
  const GateCNNConfig cfg;
  const std::string good = serialize_weights(cfg, init_weights(cfg, 1));
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_weights(bad), FormatError);
  bad = good;
  bad[4] = 9;
  EXPECT_THROW(deserialize_weights(bad), FormatError);
  EXPECT_THROW(deserialize_weights(good.substr(0, good.size() - 1)), FormatError);
  EXPECT_THROW(deserialize_weights(good + "x"), FormatError);
  EXPECT_THROW(deserialize_weights(""), FormatError);
  bad = good;
  bad[4 + 2 + 48 + 2] = 'q';  // first tensor name
  EXPECT_THROW(deserialize_weights(bad), FormatError);
}

TEST(WeightsFormatTest, RejectsNonFinite) {
  const GateCNNConfig cfg;
  ModelWeights w = init_weights(cfg, 1);
  w.b_cls[2] = std::nan("");
  EXPECT_THROW(deserialize_weights(serialize_weights(cfg, w)), FormatError);
}

TEST(WeightsFormatTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "gatecnn_io_test.gcnn";
  const GateCNNConfig cfg;
  const ModelWeights w = init_weights(cfg, 2);
  save_weights(path.string(), cfg, w);
  EXPECT_EQ(load_weights(path.string()).weights, w);
  std::filesystem::remove(path);
  EXPECT_THROW(load_weights(path.string()), FormatError);
}

}  // namespace
}  // namespace gatecnn
