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

#include <gtest/gtest.h>

#include <cmath>

#include "gatecnn/errors.h"
#include "gatecnn/oracle.h"
#include "gatecnn/random.h"

namespace gatecnn {
namespace {

Tensor random_input(const GateCNNConfig& cfg, Rng& rng) {
  Tensor t(cfg.input_shape());
  for (double& v : t.data()) v = rng.uniform();
  return t;
}

GateCNNConfig random_config(Rng& rng) {
  GateCNNConfig cfg;
  cfg.in_channels = 1 + rng.below(2);
  cfg.fuse_channels = 1 + rng.below(3);
  cfg.fuse_kernel = 1 + 2 * rng.below(2);
  cfg.pool = {1 + rng.below(2), 1 + rng.below(2)};
  cfg.doppler_bins = cfg.pool.h * (2 + rng.below(7));
  cfg.time_steps = cfg.pool.w * (2 + rng.below(7));
  cfg.embed_dim = 1 + rng.below(5);
  cfg.gate_taps = 1 + 2 * rng.below(3);
  cfg.content_channels = 1 + rng.below(6);
  cfg.cascade_kernel = 1 + 2 * rng.below(2);
  cfg.num_classes = 2 + rng.below(5);
  return cfg;
}

TEST(ConfigTest, DefaultsDescribeThemselves) {
  EXPECT_EQ(describe(GateCNNConfig{}),
            "in_channels=1 doppler_bins=30 time_steps=28 fuse_channels=1 "
            "fuse_kernel=3 pool=2x2 embed_dim=4 gate_taps=3 content_channels=16 "
            "cascade_kernel=3 num_classes=6");
  GateCNNConfig{}.validate();
}

TEST(ConfigTest, RejectsInvalid) {
  GateCNNConfig cfg;
  cfg.gate_taps = 2;
  EXPECT_THROW(cfg.validate(), ValueError);
  cfg = {};
  cfg.fuse_kernel = 4;
  EXPECT_THROW(cfg.validate(), ValueError);
  cfg = {};
  cfg.num_classes = 1;
  EXPECT_THROW(cfg.validate(), ValueError);
  cfg = {};
  cfg.pool = {31, 2};
  EXPECT_THROW(cfg.validate(), ValueError);
  cfg = {};
  cfg.embed_dim = 0;
  EXPECT_THROW(cfg.validate(), ValueError);
}

TEST(CountingTest, DefaultParameterCount) {
  // Hand tally for the default configuration.
  const std::size_t expected = (1 * 1 * 3 * 3 + 1)  // fuse
                               + (4 * 1 * 15 * 1 + 4)  // embed
                               + 2 * (4 * 3 + 4)       // gate, content
                               + (16 * 1 * 3 * 3 + 16)  // cascade1
                               + (16 * 16 * 3 * 3 + 16)  // cascade2
                               + (1 * 16 * 3 * 3 + 1)   // cascade3
                               + (4 + 1)                // average
                               + (6 * 14 + 6);          // classify
  EXPECT_EQ(expected, 2826u);
  EXPECT_EQ(param_count(GateCNNConfig{}), expected);
  EXPECT_EQ(ModelWeights::zeros(GateCNNConfig{}).parameter_count(), expected);
}

TEST(CountingTest, DefaultsBracketPublishedSize) {
  const GateCNNConfig cfg;
  EXPECT_GE(param_count(cfg), 2000u);
  EXPECT_LE(param_count(cfg), 3500u);
  EXPECT_GE(flop_count(cfg), 150000u);
  EXPECT_LE(flop_count(cfg), 450000u);
}

TEST(CountingTest, MatchesOraclesOnRandomConfigs) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const GateCNNConfig cfg = random_config(rng);
    ASSERT_NO_THROW(cfg.validate()) << describe(cfg);
    EXPECT_EQ(param_count(cfg), oracle::enumerate_params(cfg)) << describe(cfg);
    const ModelWeights w = init_weights(cfg, trial);
    const oracle::CountedForward counted =
        oracle::counted_forward(cfg, w, random_input(cfg, rng));
    EXPECT_EQ(flop_count(cfg), counted.flops()) << describe(cfg);
  }
}

TEST(CountingTest, StagesInOrder) {
  const auto work = stage_work(GateCNNConfig{});
  ASSERT_EQ(work.size(), kStageNames.size());
  for (std::size_t i = 0; i < work.size(); ++i) EXPECT_EQ(work[i].name, kStageNames[i]);
  // Unpadded stages do one MAC per weight per output column.
  EXPECT_EQ(work[2].macs, 4u * 15u * 14u);
  EXPECT_EQ(work[10].macs, 6u * 14u);
  EXPECT_EQ(work[1].macs, 0u);
  EXPECT_EQ(work[1].comparisons, 15u * 14u * 3u);
}

TEST(ForwardTest, ShapesForDefaults) {
  const GateCNNConfig cfg;
  Rng rng(1);
  const ForwardTrace t = forward(cfg, init_weights(cfg, 1), random_input(cfg, rng));
  EXPECT_EQ(t.x1.shape(), (Shape{1, 30, 28}));
  EXPECT_EQ(t.x_ds.shape(), (Shape{1, 15, 14}));
  EXPECT_EQ(t.x_conv1.shape(), (Shape{4, 14}));
  EXPECT_EQ(t.z.shape(), (Shape{4, 14}));
  EXPECT_EQ(t.x_conv3.shape(), (Shape{16, 4, 14}));
  EXPECT_EQ(t.x_conv5.shape(), (Shape{4, 14}));
  EXPECT_EQ(t.y.shape(), (Shape{4, 14}));
  EXPECT_EQ(t.v.shape(), (Shape{14}));
  EXPECT_EQ(t.logits.shape(), (Shape{6}));
}

TEST(ForwardTest, MatchesCountedOracleLogits) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const GateCNNConfig cfg = random_config(rng);
    const ModelWeights w = init_weights(cfg, 100 + trial);
    const Tensor x = random_input(cfg, rng);
    const ForwardTrace t = forward(cfg, w, x);
    const oracle::CountedForward c = oracle::counted_forward(cfg, w, x);
    ASSERT_EQ(c.logits.size(), t.logits.size());
    for (std::size_t i = 0; i < c.logits.size(); ++i) {
      EXPECT_NEAR(c.logits[i], t.logits[i], 1e-12 * (1 + std::fabs(c.logits[i])));
    }
  }
}

TEST(ForwardTest, GatedCombineIsExactElementwise) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const GateCNNConfig cfg;
    const ForwardTrace t =
        forward(cfg, init_weights(cfg, trial), random_input(cfg, rng));
    for (std::size_t i = 0; i < t.y.size(); ++i) {
      EXPECT_EQ(t.y[i], t.x_conv5[i] * std::max(t.z[i], 0.0) + t.x_conv1[i]);
    }
  }
}

TEST(ForwardTest, ZeroContentLeavesResidual) {
  const GateCNNConfig cfg;
  Rng rng(4);
  ModelWeights w = init_weights(cfg, 4);
  w.w_c4.fill(0.0);
  w.b_c4.fill(0.0);
  const ForwardTrace t = forward(cfg, w, random_input(cfg, rng));
  EXPECT_EQ(t.y, t.x_conv1);
}

TEST(ForwardTest, ClosedGateLeavesResidual) {
  const GateCNNConfig cfg;
  Rng rng(5);
  ModelWeights w = init_weights(cfg, 5);
  w.w_g.fill(0.0);
  w.b_g.fill(-1.0);
  const ForwardTrace t = forward(cfg, w, random_input(cfg, rng));
  EXPECT_EQ(t.y, t.x_conv1);
}

TEST(ForwardTest, UniformAverageIsColumnMean) {
  const GateCNNConfig cfg;
  Rng rng(6);
  const ForwardTrace t = forward(cfg, init_weights(cfg, 6), random_input(cfg, rng));
  for (std::size_t x = 0; x < 14; ++x) {
    double s = 0.0;
    for (std::size_t d = 0; d < 4; ++d) s += t.y.at(d, x);
    EXPECT_NEAR(t.v[x], s / 4.0, 1e-14);
  }
}

TEST(ForwardTest, RejectsWrongInput) {
  const GateCNNConfig cfg;
  const ModelWeights w = init_weights(cfg, 0);
  try {
    forward(cfg, w, Tensor({1, 29, 28}));
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("1x29x28"), std::string::npos) << e.what();
  }
  ModelWeights bad = w;
  bad.w_cls = Tensor({6, 13});
  EXPECT_THROW(forward(cfg, bad, Tensor(cfg.input_shape())), DimensionError);
}

TEST(ForwardTest, Deterministic) {
  const GateCNNConfig cfg;
  Rng rng(7);
  const Tensor x = random_input(cfg, rng);
  EXPECT_EQ(forward(cfg, init_weights(cfg, 9), x).logits,
            forward(cfg, init_weights(cfg, 9), x).logits);
  EXPECT_NE(init_weights(cfg, 9), init_weights(cfg, 10));
}

TEST(InitTest, WithinFanInBounds) {
  const GateCNNConfig cfg;
  const ModelWeights w = init_weights(cfg, 3);
  const auto fans = fan_ins(cfg);
  const auto tensors = w.tensors();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    if (fans[t] == 0) continue;
    const double bound = std::sqrt(1.0 / static_cast<double>(fans[t]));
    for (double v : tensors[t]->data()) EXPECT_LE(std::fabs(v), bound);
  }
  for (double v : w.w_avg.data()) EXPECT_EQ(v, 0.25);
  EXPECT_EQ(w.b_avg[0], 0.0);
}

TEST(ArgmaxTest, TiesGoLow) {
  const std::vector<double> a = {1.0, 3.0, 3.0, 2.0};
  EXPECT_EQ(argmax(a), 1u);
}

}  // namespace
}  // namespace gatecnn
