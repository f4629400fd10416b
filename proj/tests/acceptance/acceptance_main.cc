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

// Acceptance checks. Prints one "criterion N PASS|FAIL <detail>" line per
// criterion and exits non-zero if any fails.
//
// Usage: acceptance_test <path to gatecnn binary>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gatecnn/binary_io.h"
#include "gatecnn/dataflow.h"
#include "gatecnn/model.h"
#include "gatecnn/ops.h"
#include "gatecnn/oracle.h"
#include "gatecnn/quant.h"
#include "gatecnn/random.h"
#include "gatecnn/rom.h"
#include "gatecnn/synth.h"
#include "gatecnn/train.h"

namespace gatecnn {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

GateCNNConfig random_config(Rng& rng) {
  GateCNNConfig cfg;
  cfg.in_channels = 1 + rng.below(2);
  cfg.fuse_channels = 1 + rng.below(3);
  cfg.fuse_kernel = 1 + 2 * rng.below(2);
  cfg.pool = {1 + rng.below(2), 1 + rng.below(2)};
  cfg.doppler_bins = cfg.pool.h * (2 + rng.below(15));
  cfg.time_steps = cfg.pool.w * (2 + rng.below(15));
  cfg.embed_dim = 1 + rng.below(6);
  cfg.gate_taps = 1 + 2 * rng.below(3);
  cfg.content_channels = 1 + rng.below(16);
  cfg.cascade_kernel = 1 + 2 * rng.below(2);
  cfg.num_classes = 2 + rng.below(7);
  return cfg;
}

Outcome conv_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  int instances = 0, mismatches = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t c = 1 + rng.below(4), h = 1 + rng.below(8), w = 1 + rng.below(8);
    const Tensor x = random_tensor({c, h, w}, rng);
    const std::size_t kh = 1 + rng.below(std::min<std::size_t>(h, 5));
    const std::size_t kw = 1 + rng.below(std::min<std::size_t>(w, 5));
    const std::size_t ph = rng.below(kh), pw = rng.below(kw);
    const std::size_t sh = 1 + rng.below(2), sw = 1 + rng.below(2);
    const std::size_t oc = 1 + rng.below(4);
    const Tensor k = random_tensor({oc, c, kh, kw}, rng);
    std::vector<double> b(oc);
    for (double& v : b) v = rng.uniform(-1, 1);
    mismatches += conv2d(x, k, b, {sh, sw}, {ph, pw}) !=
                  oracle::conv2d(x, k, b, sh, sw, ph, pw);

    const std::size_t taps = 2 * rng.below(4) + 1;
    const Tensor x2 = x.reshaped({c, h * w});
    const Tensor k1 = random_tensor({c, taps}, rng);
    std::vector<double> b1(c);
    for (double& v : b1) v = rng.uniform(-1, 1);
    mismatches += conv1d_time(x2, k1, b1) != oracle::conv1d_time(x2, k1, b1);

    const std::size_t wh = 1 + rng.below(h), ww = 1 + rng.below(w);
    mismatches += maxpool2d(x, {wh, ww}) != oracle::maxpool2d(x, wh, ww);
    ++instances;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt("instances=%d per op, mismatches=%d, runtime=%.2fs (limit 10s)",
              instances, mismatches, secs)};
}

Outcome gating_algebra() {
  const GateCNNConfig cfg;
  int exact_fail = 0, expr_fail = 0, residual_fail = 0;
  std::size_t gated = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(2000 + trial);
    // Dyadic-grid weights and inputs keep every float operation exact, so the
    // identity can be compared without rounding in the subtraction.
    ModelWeights dy = ModelWeights::zeros(cfg);
    for (Tensor* t : dy.tensors()) {
      for (double& v : t->data()) v = static_cast<double>(rng.below(5)) / 8.0 - 0.25;
    }
    Tensor x(cfg.input_shape());
    for (double& v : x.data()) v = static_cast<double>(rng.below(9)) / 8.0;
    const ForwardTrace t = forward(cfg, dy, x);
    for (std::size_t i = 0; i < t.y.size(); ++i) {
      const double gated_term = t.x_conv5[i] * std::max(t.z[i], 0.0);
      exact_fail += (t.y[i] - t.x_conv1[i]) != gated_term;
      gated += gated_term != 0.0;
    }

    // Generic float models: y must be exactly the rounded x5*relu(z) + x1.
    ModelWeights w = init_weights(cfg, 3000 + trial);
    const Tensor xr = random_tensor(cfg.input_shape(), rng, 0.0, 1.0);
    const ForwardTrace g = forward(cfg, w, xr);
    for (std::size_t i = 0; i < g.y.size(); ++i) {
      expr_fail += g.y[i] != g.x_conv5[i] * std::max(g.z[i], 0.0) + g.x_conv1[i];
    }

    w.w_c4.fill(0.0);
    w.b_c4.fill(0.0);
    const ForwardTrace r = forward(cfg, w, xr);
    residual_fail += r.y != r.x_conv1;
  }
  return {exact_fail == 0 && expr_fail == 0 && residual_fail == 0 && gated > 0,
          fmt("50 models: exact identity mismatches=%d (nonzero gated terms=%zu), "
              "float expression mismatches=%d, w_c4=0 residual mismatches=%d",
              exact_fail, gated, expr_fail, residual_fail)};
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  GateCNNConfig cfg;
  cfg.doppler_bins = 8;
  cfg.time_steps = 8;
  cfg.fuse_channels = 2;
  cfg.embed_dim = 2;
  cfg.content_channels = 2;
  cfg.num_classes = 3;
  double worst = 0.0;
  std::string where;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ModelWeights w = init_weights(cfg, seed);
    Rng rng(4000 + seed);
    const Tensor x = random_tensor(cfg.input_shape(), rng, 0.0, 1.0);
    const std::size_t label = seed % cfg.num_classes;
    const BackwardResult b = backward(cfg, w, x, label);
    const ModelWeights fd = oracle::finite_difference_gradients(cfg, w, x, label, 1e-5);
    const auto ga = b.grads.tensors();
    const auto gf = fd.tensors();
    for (std::size_t t = 0; t < ga.size(); ++t) {
      for (std::size_t i = 0; i < ga[t]->size(); ++i) {
        const double e = oracle::relative_error((*ga[t])[i], (*gf[t])[i]);
        if (e > worst) {
          worst = e;
          where = fmt("%s[%zu] seed %llu", std::string(ModelWeights::names()[t]).c_str(),
                      i, static_cast<unsigned long long>(seed));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 60.0,
          fmt("10 seeds, max relative error=%.3g at %s (limit 1e-4), runtime=%.2fs",
              worst, where.c_str(), secs)};
}

Outcome counting() {
  Rng rng(5000);
  int param_fail = 0, flop_fail = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const GateCNNConfig cfg = random_config(rng);
    param_fail += param_count(cfg) != oracle::enumerate_params(cfg);
    const ModelWeights w = init_weights(cfg, trial);
    const oracle::CountedForward c =
        oracle::counted_forward(cfg, w, random_tensor(cfg.input_shape(), rng, 0.0, 1.0));
    flop_fail += flop_count(cfg) != c.flops();
  }
  const GateCNNConfig cfg;
  const std::uint64_t p = param_count(cfg), f = flop_count(cfg);
  const bool bracket = p >= 2000 && p <= 3500 && f >= 150000 && f <= 450000;
  return {param_fail == 0 && flop_fail == 0 && bracket,
          fmt("20 configs: param mismatches=%d flop mismatches=%d; default "
              "params=%llu flops=%llu (brackets [2000,3500] / [150000,450000])",
              param_fail, flop_fail, static_cast<unsigned long long>(p),
              static_cast<unsigned long long>(f))};
}

Outcome learnability() {
  const auto t0 = std::chrono::steady_clock::now();
  GateCNNConfig cfg;
  cfg.num_classes = 3;
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto data = generate(separable_spec(seed));
    TrainConfig tc;
    tc.seed = seed;
    const TrainResult a = train(cfg, data, tc);
    const TrainResult b = train(cfg, data, tc);
    bool same = a.weights == b.weights && a.history.size() == b.history.size();
    for (std::size_t i = 0; same && i < a.history.size(); ++i) {
      same = a.history[i].mean_loss == b.history[i].mean_loss &&
             a.history[i].accuracy == b.history[i].accuracy;
    }
    std::size_t first = 0;
    for (const EpochRecord& r : a.history) {
      if (r.accuracy >= 0.9) {
        first = r.epoch;
        break;
      }
    }
    const double acc = a.history.back().accuracy;
    ok = ok && acc >= 0.9 && same && a.history.size() <= 50;
    detail += fmt("seed %llu: final accuracy=%.4f, >=90%% at epoch %zu, rerun %s; ",
                  static_cast<unsigned long long>(seed), acc, first,
                  same ? "identical" : "DIFFERS");
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 180.0;
  return {ok, detail + fmt("lr=0.01 batch=4 epochs=50, runtime=%.1fs (limit 180s)", secs)};
}

Outcome quantization() {
  const GateCNNConfig cfg;
  const TrainResult trained = train(cfg, generate(default_spec(0)), TrainConfig{});
  const ModelWeights& w = trained.weights;
  SynthSpec eval_spec = default_spec(77);
  eval_spec.samples_per_class = 167;
  std::vector<MicroDopplerFrame> frames = generate(eval_spec);
  frames.resize(1000);

  const QuantizedModel qm = quantize_model(cfg, w);
  const FidelityReport fr = compare_fixed_float(cfg, w, qm, frames);

  double max_deq = 0.0;
  const ModelWeights back = dequantize_model(qm);
  const auto a = w.tensors();
  const auto b = back.tensors();
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t i = 0; i < a[t]->size(); ++i) {
      max_deq = std::max(max_deq, std::fabs((*a[t])[i] - (*b[t])[i]));
    }
  }

  const std::string rom = export_rom(qm);
  const QuantizedModel parsed = parse_rom(rom);
  const bool rom_ok = parsed.same_codes(qm) && export_rom(parsed) == rom;
  const std::size_t bytes = rom_bytes(qm);
  const bool size_ok =
      bytes == 4 * qm.parameter_count() &&
      rom.find("// total_bytes: " + std::to_string(bytes) + "\n") != std::string::npos;

  return {fr.agreement() >= 0.99 && max_deq <= std::ldexp(1.0, -17) && rom_ok &&
              size_ok && qm.saturations == 0,
          fmt("trained 6-class model (train accuracy %.4f): agreement=%zu/%zu, max "
              "weight dequant error=%.3g (limit %.3g), saturations=%zu, ROM round "
              "trip %s, ROM size=%zu bytes for %zu params",
              trained.history.back().accuracy, fr.argmax_agreements, fr.frames,
              max_deq, std::ldexp(1.0, -17), qm.saturations,
              rom_ok ? "bitwise" : "MISMATCH", bytes, qm.parameter_count())};
}

Outcome pipeline() {
  PipelineReport ref;
  ref.stages.push_back({"reference", 0, 0, kReferenceLatencyCycles, kReferenceLatencyCycles});
  ref.total_latency_cycles = kReferenceLatencyCycles;
  ref.clock_hz = 100e6;
  finalize_report(ref);
  const bool pairing = ref.latency_seconds == 10750.0 / 100e6 &&
                       std::fabs(ref.latency_seconds - 107.5e-6) < 1e-18 &&
                       ref.throughput_inf_per_s == 100e6 / 10750.0 &&
                       std::round(ref.throughput_inf_per_s / 100.0) == 93.0;

  Rng rng(7000);
  int violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const GateCNNConfig cfg = random_config(rng);
    const PipelineReport r = estimate(cfg);
    const ParallelPaths p = parallel_paths(r);
    std::uint64_t serial = 0;
    for (const StageCost& s : r.stages) {
      if (s.name != "gate" && s.name != "content" && s.name.rfind("cascade", 0) != 0) {
        serial += s.stage_latency;
      }
    }
    violations += r.total_latency_cycles != serial + std::max(p.gate, p.content);
    violations += r.latency_seconds != r.total_latency_cycles / r.clock_hz;

    PipelineOptions wide;
    wide.parallelism = 2 + rng.below(8);
    violations += estimate(cfg, wide).total_latency_cycles > r.total_latency_cycles;
    GateCNNConfig bigger = cfg;
    bigger.content_channels += 1;
    violations += estimate(bigger).total_latency_cycles < r.total_latency_cycles;
    bigger = cfg;
    bigger.embed_dim += 1;
    violations += estimate(bigger).total_latency_cycles < r.total_latency_cycles;
  }
  const PipelineReport d = estimate(GateCNNConfig{});
  return {pairing && violations == 0 && d.realtime_ok,
          fmt("10750 cycles -> %.4g s, %.1f inf/s; property violations=%d over 50 "
              "configs; default latency=%llu cycles (%.3g s), realtime_ok=%s",
              ref.latency_seconds, ref.throughput_inf_per_s, violations,
              static_cast<unsigned long long>(d.total_latency_cycles),
              d.latency_seconds, d.realtime_ok ? "true" : "false")};
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const fs::path root = fs::temp_directory_path() / "gatecnn_acceptance";
  fs::remove_all(root);
  std::vector<std::string> artifacts[2];
  int failures = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = root / std::to_string(pass);
    fs::create_directories(dir);
    const std::string d = (dir / "data.mdfr").string(), w = (dir / "model.gcnn").string(),
                      q = (dir / "model.gcnq").string(), r = (dir / "rom.h").string();
    failures += run_cli(cli, "gen-data --spec defaults --seed 42 --out " + d) != 0;
    failures += run_cli(cli, "train --data " + d + " --out " + w +
                                 " --epochs 5 --lr 0.01 --seed 7") != 0;
    failures += run_cli(cli, "quantize --weights " + w + " --data " + d + " --out " + q) != 0;
    failures += run_cli(cli, "export-rom --quantized " + q + " --out " + r) != 0;
    for (const std::string& p : {d, w, q, r}) {
      artifacts[pass].push_back(fs::exists(p) ? read_file(p) : std::string());
    }
  }
  int differing = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < artifacts[0].size(); ++i) {
    differing += artifacts[0][i].empty() || artifacts[0][i] != artifacts[1][i];
    total += artifacts[0][i].size();
  }
  fs::remove_all(root);
  return {failures == 0 && differing == 0,
          fmt("gen-data/train/quantize/export-rom run twice: command failures=%d, "
              "differing artifacts=%d of 4 (%zu bytes compared)",
              failures, differing, total)};
}

}  // namespace
}  // namespace gatecnn

int main(int argc, char** argv) {
  using gatecnn::Outcome;
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, gatecnn::conv_oracles},  {2, gatecnn::gating_algebra},
      {3, gatecnn::gradient_check}, {4, gatecnn::counting},
      {5, gatecnn::learnability},  {6, gatecnn::quantization},
      {7, gatecnn::pipeline},      {8, [&] { return gatecnn::determinism(cli); }},
  };
  int failed = 0;
  for (const auto& [n, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %s %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
