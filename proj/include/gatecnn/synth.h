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

// Synthetic micro-Doppler spectrograms: a Gaussian ridge along a per-class
// Doppler trajectory h(t), plus i.i.d. Gaussian noise, clamped to [0, 1].

#ifndef GATECNN_SYNTH_H_
#define GATECNN_SYNTH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gatecnn/frame.h"

namespace gatecnn {

enum class TrajectoryKind { kConstant, kLinear, kSinusoidal };

struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::kConstant;
  double center = 15.0;     // constant and sinusoidal
  double start = 0.0;       // linear, bin at t = 0
  double end = 0.0;         // linear, bin at t = time_steps - 1
  double amplitude = 0.0;   // sinusoidal swing in bins
  double period = 1.0;      // sinusoidal, in time steps
  double phase = 0.0;       // sinusoidal, radians

  /// Doppler bin of the ridge at time step t, with an extra phase offset.
  double at(std::size_t t, std::size_t time_steps, double extra_phase = 0.0) const;
  /// Smallest and largest bin over all time steps and phases.
  std::pair<double, double> bounds(std::size_t time_steps) const;
};

struct SignatureTemplate {
  std::string name;
  Trajectory trajectory;
  double bandwidth = 1.5;  // Gaussian sigma in bins
  double amplitude = 1.0;
};

struct SynthSpec {
  std::vector<SignatureTemplate> classes;
  double noise_std = 0.05;
  std::size_t samples_per_class = 20;
  std::uint64_t seed = 0;
  std::size_t channels = 1;
  std::size_t doppler_bins = 30;
  std::size_t time_steps = 28;
  double center_jitter = 0.0;  // per-sample uniform offset in bins
  double phase_jitter = 0.0;   // per-sample uniform phase offset, radians

  /// Throws ValueError; trajectories (including jitter) must stay in
  /// [0, doppler_bins - 1].
  void validate() const;
};

/// Six activity-like classes on 1 x 30 x 28 frames.
SynthSpec default_spec(std::uint64_t seed = 0);

/// Three constant-Doppler classes at well-separated bins.
SynthSpec separable_spec(std::uint64_t seed = 0,
                         std::size_t samples_per_class = 20);

/// Frames in class-major order: all samples of class 0, then class 1, ...
std::vector<MicroDopplerFrame> generate(const SynthSpec& spec);

struct Split {
  std::vector<MicroDopplerFrame> train;
  std::vector<MicroDopplerFrame> test;
};

/// Stratified split: each label contributes round(n * holdout_fraction)
/// randomly chosen frames to test. Both sides keep the input order. Throws
/// ValueError if any label would end up absent from either side.
Split split(std::span<const MicroDopplerFrame> frames, double holdout_fraction,
            std::uint64_t seed);

SynthSpec spec_from_json(std::string_view json_text);
std::string spec_to_json(const SynthSpec& spec);

// MDFR files: "MDFR", version u16, count u32, channels u32, doppler_bins u32,
// time_steps u32, then per frame a label u8 and channels*bins*steps float64
// values, all little-endian.
inline constexpr std::uint16_t kFramesFormatVersion = 1;

std::string serialize_frames(std::span<const MicroDopplerFrame> frames);
std::vector<MicroDopplerFrame> deserialize_frames(std::string_view bytes);
void save_frames(const std::string& path,
                 std::span<const MicroDopplerFrame> frames);
std::vector<MicroDopplerFrame> load_frames(const std::string& path);

}  // namespace gatecnn

#endif  // GATECNN_SYNTH_H_
