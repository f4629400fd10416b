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

// gatecnn: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data or format error, 3 invariant
// failure (non-finite values, failed selftest).

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gatecnn/dataflow.h"
#include "gatecnn/errors.h"
#include "gatecnn/model.h"
#include "gatecnn/model_io.h"
#include "gatecnn/quant.h"
#include "gatecnn/rom.h"
#include "gatecnn/synth.h"
#include "gatecnn/train.h"
#include "selftest.h"

namespace gatecnn::tools {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInvariant = 3;

// Thrown for missing inputs and unwritable outputs, before any work starts.
struct PathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag values that parse but are out of range.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Fn>
void validate_flags(Fn&& fn) {
  try {
    fn();
  } catch (const ValueError& e) {
    throw UsageError(e.what());
  }
}

void require_input(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw PathError("input file not found: " + path);
  }
}

void require_output(const std::string& path) {
  const std::filesystem::path parent =
      std::filesystem::absolute(path).parent_path();
  std::error_code ec;
  if (!std::filesystem::is_directory(parent, ec)) {
    throw PathError("output directory does not exist: " + parent.string());
  }
  if (std::filesystem::is_directory(path, ec)) {
    throw PathError("output path is a directory: " + path);
  }
}

// Architecture for a dataset: default hyperparameters with the input geometry
// and class count taken from the frames.
GateCNNConfig config_for(const std::vector<MicroDopplerFrame>& frames) {
  if (frames.empty()) throw ValueError("dataset is empty");
  GateCNNConfig cfg;
  const Tensor& first = frames.front().data;
  cfg.in_channels = first.dim(0);
  cfg.doppler_bins = first.dim(1);
  cfg.time_steps = first.dim(2);
  std::size_t max_label = 0;
  for (const MicroDopplerFrame& f : frames) max_label = std::max(max_label, f.label);
  cfg.num_classes = std::max<std::size_t>(2, max_label + 1);
  cfg.validate();
  return cfg;
}

void check_dataset(const GateCNNConfig& cfg,
                   const std::vector<MicroDopplerFrame>& frames) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].data.shape() != cfg.input_shape()) {
      throw DimensionError("frame " + std::to_string(i) + " has shape " +
                           shape_string(frames[i].data.shape()) +
                           ", model expects " + shape_string(cfg.input_shape()));
    }
    if (frames[i].label >= cfg.num_classes) {
      throw ValueError("frame " + std::to_string(i) + " has label " +
                       std::to_string(frames[i].label) + " but the model has " +
                       std::to_string(cfg.num_classes) + " classes");
    }
  }
}

struct GenDataArgs {
  std::string spec = "defaults";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples_per_class;
};

int gen_data(const GenDataArgs& a) {
  if (a.spec != "defaults" && a.spec != "separable") require_input(a.spec);
  require_output(a.out);
  SynthSpec spec;
  if (a.spec == "defaults") {
    spec = default_spec();
  } else if (a.spec == "separable") {
    spec = separable_spec();
  } else {
    spec = spec_from_json(read_file(a.spec));
  }
  if (a.seed) spec.seed = *a.seed;
  if (a.samples_per_class) spec.samples_per_class = *a.samples_per_class;
  spec.validate();
  const std::vector<MicroDopplerFrame> frames = generate(spec);
  save_frames(a.out, frames);
  std::cout << "frames=" << frames.size() << " classes=" << spec.classes.size()
            << " shape=" << shape_string(frames.front().data.shape())
            << " seed=" << spec.seed << " out=" << a.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string out;
  TrainConfig tc;
};

int train_command(const TrainArgs& a) {
  validate_flags([&] { a.tc.validate(); });
  require_input(a.data);
  require_output(a.out);
  const std::vector<MicroDopplerFrame> frames = load_frames(a.data);
  const GateCNNConfig cfg = config_for(frames);
  std::cout << "config: " << describe(cfg) << "\n";
  const TrainResult result = train(cfg, frames, a.tc);
  for (const EpochRecord& r : result.history) std::cout << format_record(r) << "\n";
  if (!result.weights.all_finite()) throw NumericError("training diverged");
  save_weights(a.out, cfg, result.weights);
  std::cout << "parameters=" << result.weights.parameter_count()
            << " out=" << a.out << "\n";
  return kExitOk;
}

struct InferArgs {
  std::string weights;
  std::string data;
  bool fixed = false;
  int frac_bits = 16;
};

int infer(const InferArgs& a) {
  FixedPointSpec spec;
  spec.frac_bits = a.frac_bits;
  validate_flags([&] { spec.validate(); });
  require_input(a.weights);
  require_input(a.data);
  const SavedModel m = load_weights(a.weights);
  const std::vector<MicroDopplerFrame> frames = load_frames(a.data);
  check_dataset(m.config, frames);
  const QuantizedModel qm = quantize_model(m.config, m.weights, spec);

  std::size_t correct = 0, agree = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::size_t float_pred = predict(m.config, m.weights, frames[i].data);
    std::size_t pred = float_pred;
    if (a.fixed) {
      pred = predict_fixed(qm, frames[i].data);
      if (pred == float_pred) ++agree;
    }
    if (pred == frames[i].label) ++correct;
    std::printf("frame=%zu label=%zu prediction=%zu\n", i, frames[i].label, pred);
  }
  const double n = static_cast<double>(frames.size());
  std::printf("mode=%s frames=%zu accuracy=%.4f\n", a.fixed ? "fixed" : "float",
              frames.size(), correct / n);
  if (a.fixed) {
    std::printf("fixed_point=%s argmax_agreement=%.4f\n", spec.name().c_str(),
                agree / n);
  }
  return kExitOk;
}

struct QuantizeArgs {
  std::string weights;
  std::string out;
  std::string data;
  int frac_bits = 16;
  std::string rounding = "nearest-even";
  std::string overflow = "saturate";
};

int quantize_command(const QuantizeArgs& a) {
  FixedPointSpec spec;
  spec.frac_bits = a.frac_bits;
  spec.rounding = parse_rounding(a.rounding);
  spec.overflow = parse_overflow(a.overflow);
  validate_flags([&] { spec.validate(); });
  require_input(a.weights);
  if (!a.data.empty()) require_input(a.data);
  require_output(a.out);

  const SavedModel m = load_weights(a.weights);
  // Without --data the audit runs over the built-in synthetic set, which only
  // exists for the default frame geometry.
  std::vector<MicroDopplerFrame> calibration;
  if (!a.data.empty()) {
    calibration = load_frames(a.data);
  } else {
    const SynthSpec s = default_spec();
    if (m.config.input_shape() != Shape{s.channels, s.doppler_bins, s.time_steps}) {
      throw ValueError("model input shape " + shape_string(m.config.input_shape()) +
                       " has no built-in calibration set; pass --data");
    }
    calibration = generate(s);
  }
  check_dataset(m.config, calibration);

  const QuantizedModel qm = quantize_model(m.config, m.weights, spec);
  for (const std::string& w : qm.warnings) std::cerr << "warning: " << w << "\n";
  const RangeAudit audit = audit_ranges(m.config, m.weights, calibration);
  std::cout << format_audit(audit);
  std::cout << "fixed_point=" << spec.name()
            << " max_integer_bits=" << audit.max_required_integer_bits()
            << " fits=" << (audit.fits(spec) ? "true" : "false")
            << " saturated_weights=" << qm.saturations << "\n";
  std::cout << format_fidelity(compare_fixed_float(m.config, m.weights, qm, calibration));
  save_quantized(a.out, qm);
  std::cout << "parameters=" << qm.parameter_count() << " out=" << a.out << "\n";
  return kExitOk;
}

struct BenchArgs {
  std::string weights;
  PipelineOptions opts;
};

int bench(const BenchArgs& a) {
  GateCNNConfig cfg;
  if (!a.weights.empty()) {
    require_input(a.weights);
    cfg = load_weights(a.weights).config;
  }
  const PipelineReport r = estimate(cfg, a.opts);
  std::cout << "config: " << describe(cfg) << "\n";
  std::cout << "parameters=" << param_count(cfg) << " flops=" << flop_count(cfg)
            << "\n";
  std::cout << format_report(r);
  std::cout << compare_to_reference(r);
  return kExitOk;
}

struct ExportRomArgs {
  std::string quantized;
  std::string out;
};

int export_rom_command(const ExportRomArgs& a) {
  require_input(a.quantized);
  require_output(a.out);
  const QuantizedModel qm = load_quantized(a.quantized);
  write_file(a.out, export_rom(qm));
  std::cout << "parameters=" << qm.parameter_count()
            << " total_bytes=" << rom_bytes(qm) << " out=" << a.out << "\n";
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"GateCNN micro-Doppler classifier tools", "gatecnn"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic MDFR dataset");
  gen_cmd->add_option("--spec", gen.spec,
                      "JSON spec file, 'defaults' (six classes) or 'separable'")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output MDFR path")->required();
  gen_cmd->add_option("--seed", gen.seed, "Override the spec seed");
  gen_cmd->add_option("--samples-per-class", gen.samples_per_class,
                      "Override samples per class")
      ->check(CLI::PositiveNumber);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a float model with SGD");
  train_cmd->add_option("--data", tr.data, "MDFR training set")->required();
  train_cmd->add_option("--out", tr.out, "Output GCNN weights path")->required();
  train_cmd->add_option("--epochs", tr.tc.epochs)->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", tr.tc.learning_rate)->capture_default_str();
  train_cmd->add_option("--seed", tr.tc.seed)->capture_default_str();
  train_cmd->add_option("--batch-size", tr.tc.batch_size)->capture_default_str()
      ->check(CLI::PositiveNumber);

  InferArgs inf;
  auto* infer_cmd = app.add_subcommand("infer", "Classify frames");
  infer_cmd->add_option("--weights", inf.weights, "GCNN weights")->required();
  infer_cmd->add_option("--data", inf.data, "MDFR frames")->required();
  infer_cmd->add_flag("--fixed", inf.fixed, "Use the fixed-point engine");
  infer_cmd->add_option("--frac-bits", inf.frac_bits)->capture_default_str();

  QuantizeArgs qa;
  auto* quant_cmd = app.add_subcommand("quantize", "Convert weights to fixed point");
  quant_cmd->add_option("--weights", qa.weights, "GCNN weights")->required();
  quant_cmd->add_option("--out", qa.out, "Output GCNQ path")->required();
  quant_cmd->add_option("--frac-bits", qa.frac_bits)->capture_default_str();
  quant_cmd->add_option("--rounding", qa.rounding)->capture_default_str()
      ->check(CLI::IsMember({"nearest-even", "truncate"}));
  quant_cmd->add_option("--overflow", qa.overflow)->capture_default_str()
      ->check(CLI::IsMember({"saturate", "wrap"}));
  quant_cmd->add_option("--data", qa.data,
                        "Calibration frames (default: built-in synthetic set)");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Dataflow latency/throughput model");
  bench_cmd->add_option("--weights", ba.weights,
                        "GCNN weights whose config to model (default config otherwise)");
  bench_cmd->add_option("--parallelism", ba.opts.parallelism)->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--clock-hz", ba.opts.clock_hz)->capture_default_str()
      ->check(CLI::PositiveNumber);

  ExportRomArgs ra;
  auto* rom_cmd = app.add_subcommand("export-rom", "Write the weight ROM source");
  rom_cmd->add_option("--quantized", ra.quantized, "GCNQ model")->required();
  rom_cmd->add_option("--out", ra.out, "Output source path")->required();

  auto* self_cmd = app.add_subcommand("selftest", "Run oracle and invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return gen_data(gen);
    if (*train_cmd) return train_command(tr);
    if (*infer_cmd) return infer(inf);
    if (*quant_cmd) return quantize_command(qa);
    if (*bench_cmd) return bench(ba);
    if (*rom_cmd) return export_rom_command(ra);
    if (*self_cmd) return run_selftest(std::cout) ? kExitOk : kExitInvariant;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace gatecnn::tools

int main(int argc, char** argv) { return gatecnn::tools::run(argc, argv); }
