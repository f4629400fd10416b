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

#include "gatecnn/rom.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <sstream>

#include "gatecnn/errors.h"

namespace gatecnn {
namespace {

QuantizedModel default_quantized(std::uint64_t seed = 1) {
  const GateCNNConfig cfg;
  return quantize_model(cfg, init_weights(cfg, seed));
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

TEST(RomTest, SizeIsFourBytesPerParameter) {
  const QuantizedModel qm = default_quantized();
  EXPECT_EQ(rom_bytes(qm), 2826u * 4u);
  const std::string text = export_rom(qm);
  EXPECT_NE(text.find("// parameters: 2826\n"), std::string::npos);
  EXPECT_NE(text.find("// total_bytes: 11304\n"), std::string::npos);
}

TEST(RomTest, Header) {
  const auto lines = lines_of(export_rom(default_quantized()));
  ASSERT_GT(lines.size(), 6u);
  EXPECT_EQ(lines[0], "// gatecnn weight rom v1");
  EXPECT_EQ(lines[1],
            "// fixed_point: Q16.16 total_bits=32 frac_bits=16 "
            "rounding=nearest-even overflow=saturate");
  EXPECT_EQ(lines[2], "// config: " + describe(GateCNNConfig{}));
  EXPECT_EQ(lines[5], "#include <cstdint>");
}

TEST(RomTest, ArraysInOrderWithShapes) {
  const QuantizedModel qm = default_quantized();
  const std::string text = export_rom(qm);
  std::size_t pos = 0;
  const auto shapes = weight_shapes(GateCNNConfig{});
  for (std::size_t t = 0; t < ModelWeights::kTensorCount; ++t) {
    const std::string name(ModelWeights::names()[t]);
    const std::string decl = "// shape: " + shape_string(shapes[t]) +
                             "\nstatic const std::int32_t " + name + "[" +
                             std::to_string(shape_elements(shapes[t])) + "] = {";
    const std::size_t found = text.find(decl, pos);
    ASSERT_NE(found, std::string::npos) << name;
    pos = found + decl.size();
  }
}

TEST(RomTest, AtMostEightLiteralsPerLine) {
  for (const std::string& line : lines_of(export_rom(default_quantized()))) {
    if (line.empty() || line[0] != ' ') continue;
    EXPECT_LE(std::count(line.begin(), line.end(), ','), 8) << line;
  }
}

TEST(RomTest, RoundTripsBitwise) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QuantizedModel qm = default_quantized(seed);
    const std::string text = export_rom(qm);
    const QuantizedModel back = parse_rom(text);
    EXPECT_TRUE(back.same_codes(qm));
    EXPECT_EQ(export_rom(back), text);
  }
}

TEST(RomTest, ExtremeCodesSurvive) {
  QuantizedModel qm = default_quantized();
  qm.tensors[0].codes[0] = std::numeric_limits<std::int32_t>::min();
  qm.tensors[0].codes[1] = std::numeric_limits<std::int32_t>::max();
  EXPECT_TRUE(parse_rom(export_rom(qm)).same_codes(qm));
}

TEST(RomTest, RejectsTampering) {
  const std::string text = export_rom(default_quantized());
  EXPECT_THROW(parse_rom(""), FormatError);
  EXPECT_THROW(parse_rom(text.substr(0, text.size() / 2)), FormatError);
  std::string bad = text;
  bad.replace(bad.find("parameters: 2826"), 16, "parameters: 2827");
  EXPECT_THROW(parse_rom(bad), FormatError);
  bad = text;
  bad.replace(bad.find("w_c4"), 4, "w_c9");
  EXPECT_THROW(parse_rom(bad), FormatError);
}

}  // namespace
}  // namespace gatecnn
