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

#include <charconv>
#include <map>
#include <sstream>

#include "gatecnn/errors.h"

namespace gatecnn {
namespace {

constexpr std::string_view kBanner = "// gatecnn weight rom v1";
constexpr std::size_t kPerLine = 8;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("rom: bad integer '" + std::string(s) + "' in " +
                      std::string(what));
  }
  return v;
}

// "k1=v1 k2=v2 ..." after a fixed prefix.
std::map<std::string, std::string> parse_pairs(std::string_view s) {
  std::map<std::string, std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

const std::string& need(const std::map<std::string, std::string>& m,
                        const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw FormatError("rom: header missing '" + key + "'");
  return it->second;
}

class LineCursor {
 public:
  explicit LineCursor(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    while (pos_ <= text_.size()) {
      if (pos_ == text_.size()) return false;
      const std::size_t end = text_.find('\n', pos_);
      const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
      line = trim(text_.substr(pos_, stop - pos_));
      pos_ = stop + 1;
      if (!line.empty()) return true;
    }
    return false;
  }

  std::string_view expect(std::string_view what) {
    std::string_view line;
    if (!next(line)) {
      throw FormatError("rom: unexpected end of text, expected " +
                        std::string(what));
    }
    return line;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t rom_bytes(const QuantizedModel& qm) {
  return qm.parameter_count() * sizeof(std::int32_t);
}

std::string export_rom(const QuantizedModel& qm) {
  std::ostringstream os;
  const FixedPointSpec& s = qm.spec;
  os << kBanner << '\n';
  os << "// fixed_point: " << s.name() << " total_bits=" << s.total_bits
     << " frac_bits=" << s.frac_bits << " rounding=" << to_string(s.rounding)
     << " overflow=" << to_string(s.overflow) << '\n';
  os << "// config: " << describe(qm.config) << '\n';
  os << "// parameters: " << qm.parameter_count() << '\n';
  os << "// total_bytes: " << rom_bytes(qm) << '\n';
  os << "#include <cstdint>\n";
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    const FixedTensor& t = qm.tensors[i];
    os << "\n// shape: " << shape_string(t.shape) << '\n';
    os << "static const std::int32_t " << ModelWeights::names()[i] << '['
       << t.size() << "] = {\n";
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j % kPerLine == 0) os << "  ";
      os << t.codes[j] << ',';
      os << ((j % kPerLine == kPerLine - 1 || j + 1 == t.size()) ? "\n" : " ");
    }
    os << "};\n";
  }
  return os.str();
}

QuantizedModel parse_rom(std::string_view text) {
  LineCursor lines(text);
  if (lines.expect("banner") != kBanner) throw FormatError("rom: missing banner");

  QuantizedModel qm;
  std::string_view line = lines.expect("fixed_point header");
  if (!starts_with(line, "// fixed_point:")) {
    throw FormatError("rom: expected fixed_point header");
  }
  {
    const auto kv = parse_pairs(line.substr(15));
    qm.spec.total_bits = parse_int<int>(need(kv, "total_bits"), "total_bits");
    qm.spec.frac_bits = parse_int<int>(need(kv, "frac_bits"), "frac_bits");
    try {
      qm.spec.rounding = parse_rounding(need(kv, "rounding"));
      qm.spec.overflow = parse_overflow(need(kv, "overflow"));
      qm.spec.validate();
    } catch (const ValueError& e) {
      throw FormatError(std::string("rom: ") + e.what());
    }
  }

  line = lines.expect("config header");
  if (!starts_with(line, "// config:")) throw FormatError("rom: expected config header");
  {
    const auto kv = parse_pairs(line.substr(10));
    GateCNNConfig& c = qm.config;
    auto field = [&](const char* key) {
      return parse_int<std::size_t>(need(kv, key), key);
    };
    c.in_channels = field("in_channels");
    c.doppler_bins = field("doppler_bins");
    c.time_steps = field("time_steps");
    c.fuse_channels = field("fuse_channels");
    c.fuse_kernel = field("fuse_kernel");
    const std::string& pool = need(kv, "pool");
    const auto x = pool.find('x');
    if (x == std::string::npos) throw FormatError("rom: bad pool '" + pool + "'");
    c.pool.h = parse_int<std::size_t>(std::string_view(pool).substr(0, x), "pool");
    c.pool.w = parse_int<std::size_t>(std::string_view(pool).substr(x + 1), "pool");
    c.embed_dim = field("embed_dim");
    c.gate_taps = field("gate_taps");
    c.content_channels = field("content_channels");
    c.cascade_kernel = field("cascade_kernel");
    c.num_classes = field("num_classes");
    try {
      c.validate();
    } catch (const ValueError& e) {
      throw FormatError(std::string("rom: ") + e.what());
    }
  }

  line = lines.expect("parameters header");
  if (!starts_with(line, "// parameters:")) {
    throw FormatError("rom: expected parameters header");
  }
  const auto params = parse_int<std::size_t>(line.substr(14), "parameters");
  line = lines.expect("total_bytes header");
  if (!starts_with(line, "// total_bytes:")) {
    throw FormatError("rom: expected total_bytes header");
  }
  const auto total_bytes = parse_int<std::size_t>(line.substr(15), "total_bytes");
  if (lines.expect("include") != "#include <cstdint>") {
    throw FormatError("rom: expected #include <cstdint>");
  }

  const auto shapes = weight_shapes(qm.config);
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    const std::string name(ModelWeights::names()[i]);
    line = lines.expect("shape comment for " + name);
    if (!starts_with(line, "// shape:")) {
      throw FormatError("rom: expected shape comment for '" + name + "'");
    }
    FixedTensor t;
    {
      std::string_view dims = trim(line.substr(9));
      while (!dims.empty()) {
        const auto x = dims.find('x');
        t.shape.push_back(parse_int<std::size_t>(dims.substr(0, x), "shape"));
        if (x == std::string_view::npos) break;
        dims.remove_prefix(x + 1);
      }
    }
    if (t.shape != shapes[i]) {
      throw FormatError("rom: '" + name + "' has shape " + shape_string(t.shape) +
                        ", config implies " + shape_string(shapes[i]));
    }
    const std::string decl = "static const std::int32_t " + name + "[" +
                             std::to_string(shape_elements(t.shape)) + "] = {";
    if (lines.expect("declaration of " + name) != decl) {
      throw FormatError("rom: expected declaration '" + decl + "'");
    }
    const std::size_t n = shape_elements(t.shape);
    t.codes.reserve(n);
    while (true) {
      line = lines.expect("values of " + name);
      if (line == "};") break;
      while (!line.empty()) {
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
          throw FormatError("rom: missing ',' in values of '" + name + "'");
        }
        t.codes.push_back(parse_int<std::int32_t>(line.substr(0, comma), name));
        line = trim(line.substr(comma + 1));
      }
    }
    if (t.codes.size() != n) {
      throw FormatError("rom: '" + name + "' has " + std::to_string(t.codes.size()) +
                        " values, expected " + std::to_string(n));
    }
    qm.tensors[i] = std::move(t);
  }
  std::string_view rest;
  if (lines.next(rest)) throw FormatError("rom: trailing content after tables");
  if (params != qm.parameter_count() || total_bytes != rom_bytes(qm)) {
    throw FormatError("rom: header totals disagree with table contents");
  }
  return qm;
}

}  // namespace gatecnn
