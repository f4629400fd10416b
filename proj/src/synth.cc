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

#include "gatecnn/synth.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "gatecnn/binary_io.h"
#include "gatecnn/errors.h"
#include "gatecnn/random.h"
#include "json.hpp"

namespace gatecnn {
namespace {

using nlohmann::json;

std::string kind_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kConstant:
      return "constant";
    case TrajectoryKind::kLinear:
      return "linear";
    case TrajectoryKind::kSinusoidal:
      return "sinusoidal";
  }
  return "constant";
}

TrajectoryKind parse_kind(const std::string& s) {
  if (s == "constant") return TrajectoryKind::kConstant;
  if (s == "linear") return TrajectoryKind::kLinear;
  if (s == "sinusoidal") return TrajectoryKind::kSinusoidal;
  throw ValueError("unknown trajectory kind '" + s + "'");
}

SignatureTemplate make_template(std::string name, Trajectory t,
                                double bandwidth = 1.5) {
  return {std::move(name), t, bandwidth, 1.0};
}

Trajectory constant(double bin) {
  Trajectory t;
  t.kind = TrajectoryKind::kConstant;
  t.center = bin;
  return t;
}

Trajectory linear(double start, double end) {
  Trajectory t;
  t.kind = TrajectoryKind::kLinear;
  t.start = start;
  t.end = end;
  return t;
}

Trajectory sinusoidal(double center, double amplitude, double period) {
  Trajectory t;
  t.kind = TrajectoryKind::kSinusoidal;
  t.center = center;
  t.amplitude = amplitude;
  t.period = period;
  return t;
}

}  // namespace

double Trajectory::at(std::size_t t, std::size_t time_steps,
                      double extra_phase) const {
  switch (kind) {
    case TrajectoryKind::kConstant:
      return center;
    case TrajectoryKind::kLinear: {
      const double span = time_steps > 1 ? static_cast<double>(time_steps - 1) : 1.0;
      return start + (end - start) * static_cast<double>(t) / span;
    }
    case TrajectoryKind::kSinusoidal:
      return center + amplitude * std::sin(2.0 * std::numbers::pi *
                                               static_cast<double>(t) / period +
                                           phase + extra_phase);
  }
  return center;
}

std::pair<double, double> Trajectory::bounds(std::size_t time_steps) const {
  if (kind == TrajectoryKind::kSinusoidal) {
    // Phase jitter can reach any point of the cycle, so use the full swing.
    return {center - std::fabs(amplitude), center + std::fabs(amplitude)};
  }
  double lo = at(0, time_steps), hi = lo;
  for (std::size_t t = 1; t < time_steps; ++t) {
    lo = std::min(lo, at(t, time_steps));
    hi = std::max(hi, at(t, time_steps));
  }
  return {lo, hi};
}

void SynthSpec::validate() const {
  if (channels == 0 || doppler_bins == 0 || time_steps == 0) {
    throw ValueError("synth: frame extents must be >= 1");
  }
  if (classes.empty()) throw ValueError("synth: no classes");
  if (classes.size() > 256) throw ValueError("synth: at most 256 classes");
  if (!(noise_std >= 0.0)) throw ValueError("synth: noise_std must be >= 0");
  if (!(center_jitter >= 0.0) || !(phase_jitter >= 0.0)) {
    throw ValueError("synth: jitter must be >= 0");
  }
  const double top = static_cast<double>(doppler_bins - 1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const SignatureTemplate& s = classes[c];
    if (!(s.bandwidth > 0.0)) {
      throw ValueError("synth: class " + std::to_string(c) + " bandwidth must be > 0");
    }
    if (s.trajectory.kind == TrajectoryKind::kSinusoidal &&
        !(s.trajectory.period > 0.0)) {
      throw ValueError("synth: class " + std::to_string(c) + " period must be > 0");
    }
    const auto [lo, hi] = s.trajectory.bounds(time_steps);
    if (lo - center_jitter < 0.0 || hi + center_jitter > top) {
      throw ValueError("synth: class " + std::to_string(c) + " ('" + s.name +
                       "') trajectory leaves Doppler range [0, " +
                       std::to_string(doppler_bins - 1) + "]");
    }
  }
}

SynthSpec default_spec(std::uint64_t seed) {
  SynthSpec s;
  s.classes = {
      make_template("walking", sinusoidal(15.0, 8.0, 7.0)),
      make_template("sitting", linear(19.0, 11.0)),
      make_template("standing", linear(11.0, 19.0)),
      make_template("drinking", sinusoidal(15.0, 3.0, 14.0)),
      make_template("falling", linear(8.0, 26.0), 2.0),
      make_template("picking", sinusoidal(13.0, 5.0, 28.0)),
  };
  s.noise_std = 0.05;
  s.samples_per_class = 30;
  s.seed = seed;
  s.center_jitter = 1.5;
  s.phase_jitter = std::numbers::pi;
  return s;
}

SynthSpec separable_spec(std::uint64_t seed, std::size_t samples_per_class) {
  SynthSpec s;
  s.classes = {make_template("low", constant(6.0)),
               make_template("mid", constant(15.0)),
               make_template("high", constant(24.0))};
  s.noise_std = 0.05;
  s.samples_per_class = samples_per_class;
  s.seed = seed;
  s.center_jitter = 1.0;
  return s;
}

std::vector<MicroDopplerFrame> generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<MicroDopplerFrame> frames;
  frames.reserve(spec.classes.size() * spec.samples_per_class);
  for (std::size_t label = 0; label < spec.classes.size(); ++label) {
    const SignatureTemplate& tmpl = spec.classes[label];
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
      MicroDopplerFrame f;
      f.label = label;
      f.meta.seed = spec.seed;
      f.meta.center_offset = rng.uniform(-spec.center_jitter, spec.center_jitter);
      f.meta.phase = rng.uniform(-spec.phase_jitter, spec.phase_jitter);
      f.data = Tensor({spec.channels, spec.doppler_bins, spec.time_steps});
      for (std::size_t c = 0; c < spec.channels; ++c) {
        for (std::size_t h = 0; h < spec.doppler_bins; ++h) {
          for (std::size_t t = 0; t < spec.time_steps; ++t) {
            const double ridge =
                tmpl.trajectory.at(t, spec.time_steps, f.meta.phase) +
                f.meta.center_offset;
            const double dist = (static_cast<double>(h) - ridge) / tmpl.bandwidth;
            double v = tmpl.amplitude * std::exp(-0.5 * dist * dist);
            if (spec.noise_std > 0.0) v += spec.noise_std * rng.normal();
            f.data.at(c, h, t) = std::clamp(v, 0.0, 1.0);
          }
        }
      }
      frames.push_back(std::move(f));
    }
  }
  return frames;
}

Split split(std::span<const MicroDopplerFrame> frames, double holdout_fraction,
            std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ValueError("split: holdout fraction must be in (0, 1)");
  }
  std::map<std::size_t, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    by_label[frames[i].label].push_back(i);
  }
  Rng rng(seed);
  std::vector<bool> held_out(frames.size(), false);
  for (auto& [label, idx] : by_label) {
    const auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(idx.size()) * holdout_fraction));
    if (n_test == 0 || n_test == idx.size()) {
      throw ValueError("split: label " + std::to_string(label) + " with " +
                       std::to_string(idx.size()) +
                       " frames would be absent from one side");
    }
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.below(i)]);
    }
    for (std::size_t k = 0; k < n_test; ++k) held_out[idx[k]] = true;
  }
  Split out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    (held_out[i] ? out.test : out.train).push_back(frames[i]);
  }
  return out;
}

SynthSpec spec_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("synth spec: ") + e.what());
  }
  SynthSpec s;
  try {
    s.noise_std = j.value("noise_std", s.noise_std);
    s.samples_per_class = j.value("samples_per_class", s.samples_per_class);
    s.seed = j.value("seed", s.seed);
    s.channels = j.value("channels", s.channels);
    s.doppler_bins = j.value("doppler_bins", s.doppler_bins);
    s.time_steps = j.value("time_steps", s.time_steps);
    s.center_jitter = j.value("center_jitter", s.center_jitter);
    s.phase_jitter = j.value("phase_jitter", s.phase_jitter);
    for (const json& c : j.at("classes")) {
      SignatureTemplate t;
      t.name = c.value("name", std::string());
      t.bandwidth = c.value("bandwidth", t.bandwidth);
      t.amplitude = c.value("amplitude", t.amplitude);
      const json& tr = c.at("trajectory");
      t.trajectory.kind = parse_kind(tr.at("kind").get<std::string>());
      t.trajectory.center = tr.value("center", t.trajectory.center);
      t.trajectory.start = tr.value("start", t.trajectory.start);
      t.trajectory.end = tr.value("end", t.trajectory.end);
      t.trajectory.amplitude = tr.value("amplitude", t.trajectory.amplitude);
      t.trajectory.period = tr.value("period", t.trajectory.period);
      t.trajectory.phase = tr.value("phase", t.trajectory.phase);
      s.classes.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string spec_to_json(const SynthSpec& s) {
  json j;
  j["noise_std"] = s.noise_std;
  j["samples_per_class"] = s.samples_per_class;
  j["seed"] = s.seed;
  j["channels"] = s.channels;
  j["doppler_bins"] = s.doppler_bins;
  j["time_steps"] = s.time_steps;
  j["center_jitter"] = s.center_jitter;
  j["phase_jitter"] = s.phase_jitter;
  j["classes"] = json::array();
  for (const SignatureTemplate& t : s.classes) {
    const Trajectory& tr = t.trajectory;
    json jt = {{"kind", kind_name(tr.kind)}};
    switch (tr.kind) {
      case TrajectoryKind::kConstant:
        jt["center"] = tr.center;
        break;
      case TrajectoryKind::kLinear:
        jt["start"] = tr.start;
        jt["end"] = tr.end;
        break;
      case TrajectoryKind::kSinusoidal:
        jt["center"] = tr.center;
        jt["amplitude"] = tr.amplitude;
        jt["period"] = tr.period;
        jt["phase"] = tr.phase;
        break;
    }
    j["classes"].push_back({{"name", t.name},
                            {"bandwidth", t.bandwidth},
                            {"amplitude", t.amplitude},
                            {"trajectory", jt}});
  }
  return j.dump(2) + "\n";
}

std::string serialize_frames(std::span<const MicroDopplerFrame> frames) {
  ByteWriter out;
  out.bytes("MDFR");
  out.u16(kFramesFormatVersion);
  out.u32(static_cast<std::uint32_t>(frames.size()));
  Shape shape = frames.empty() ? Shape{0, 0, 0} : frames.front().data.shape();
  if (shape.size() != 3) throw DimensionError("MDFR: frames must be rank 3");
  for (std::size_t e : shape) out.u32(static_cast<std::uint32_t>(e));
  for (const MicroDopplerFrame& f : frames) {
    if (f.data.shape() != shape) {
      throw DimensionError("MDFR: frames have mixed shapes (" +
                           shape_string(shape) + " vs " +
                           shape_string(f.data.shape()) + ")");
    }
    if (f.label > 255) throw ValueError("MDFR: label exceeds one byte");
    out.u8(static_cast<std::uint8_t>(f.label));
    for (double v : f.data.data()) out.f64(v);
  }
  return out.release();
}

std::vector<MicroDopplerFrame> deserialize_frames(std::string_view bytes) {
  ByteReader in(bytes);
  in.expect_magic("MDFR", "MDFR frames");
  const std::uint16_t version = in.u16();
  if (version != kFramesFormatVersion) {
    throw FormatError("unsupported MDFR version " + std::to_string(version));
  }
  const std::uint32_t count = in.u32();
  Shape shape{in.u32(), in.u32(), in.u32()};
  const std::size_t n = shape_elements(shape);
  if (count > 0 && n == 0) throw FormatError("MDFR: zero frame extent");
  // label byte + payload per frame
  if (count > 0 && in.remaining() / (1 + 8 * n) < count) {
    throw FormatError("MDFR: header promises " + std::to_string(count) +
                      " frames, data is shorter");
  }
  std::vector<MicroDopplerFrame> frames(count);
  for (MicroDopplerFrame& f : frames) {
    f.label = in.u8();
    std::vector<double> data(n);
    for (double& v : data) {
      v = in.f64();
      if (!std::isfinite(v)) throw FormatError("MDFR: non-finite sample value");
    }
    f.data = Tensor(shape, std::move(data));
  }
  if (!in.at_end()) {
    throw FormatError(std::to_string(in.remaining()) +
                      " trailing bytes after MDFR payload");
  }
  return frames;
}

void save_frames(const std::string& path,
                 std::span<const MicroDopplerFrame> frames) {
  write_file(path, serialize_frames(frames));
}

std::vector<MicroDopplerFrame> load_frames(const std::string& path) {
  return deserialize_frames(read_file(path));
}

}  // namespace gatecnn
