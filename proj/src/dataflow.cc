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

#include "gatecnn/dataflow.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gatecnn/errors.h"

namespace gatecnn {
namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

const StageCost& find(const PipelineReport& r, std::string_view name) {
  for (const StageCost& s : r.stages) {
    if (s.name == name) return s;
  }
  throw ValueError("pipeline report has no stage '" + std::string(name) + "'");
}

}  // namespace

void finalize_report(PipelineReport& report) {
  if (!(report.clock_hz > 0.0) || !std::isfinite(report.clock_hz)) {
    throw ValueError("clock_hz must be positive and finite");
  }
  std::uint64_t max_ii = 0;
  for (const StageCost& s : report.stages) {
    max_ii = std::max(max_ii, s.initiation_interval);
  }
  report.latency_seconds =
      static_cast<double>(report.total_latency_cycles) / report.clock_hz;
  report.throughput_inf_per_s =
      max_ii == 0 ? 0.0 : report.clock_hz / static_cast<double>(max_ii);
  report.realtime_ok = report.latency_seconds < kRealtimeBudgetSeconds;
}

PipelineReport estimate(const GateCNNConfig& cfg, const PipelineOptions& opts) {
  if (opts.clock_hz == 0.0) throw ValueError("clock_hz must be non-zero");
  if (opts.parallelism == 0) throw ValueError("parallelism must be >= 1");

  PipelineReport report;
  report.clock_hz = opts.clock_hz;
  for (const StageWork& w : stage_work(cfg)) {
    StageCost s;
    s.name = w.name;
    s.mac_count = w.macs;
    s.elementwise_count = w.elementwise + w.comparisons;
    s.initiation_interval = ceil_div(s.mac_count, opts.parallelism) +
                            ceil_div(s.elementwise_count, opts.parallelism);
    s.stage_latency =
        s.initiation_interval == 0 ? 0 : s.initiation_interval + opts.fill_cycles;
    report.stages.push_back(std::move(s));
  }

  const ParallelPaths paths = parallel_paths(report);
  std::uint64_t total = std::max(paths.gate, paths.content);
  for (std::string_view serial :
       {"fuse", "pool", "embed", "combine", "average", "classify"}) {
    total += find(report, serial).stage_latency;
  }
  report.total_latency_cycles = total;
  finalize_report(report);
  return report;
}

ParallelPaths parallel_paths(const PipelineReport& report) {
  ParallelPaths p;
  p.gate = find(report, "gate").stage_latency;
  for (std::string_view s : {"content", "cascade1", "cascade2", "cascade3"}) {
    p.content += find(report, s).stage_latency;
  }
  return p;
}

std::string format_report(const PipelineReport& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-10s %10s %12s %10s %10s\n", "stage", "macs",
                "elementwise", "ii", "latency");
  out += buf;
  for (const StageCost& s : r.stages) {
    std::snprintf(buf, sizeof(buf), "%-10s %10llu %12llu %10llu %10llu\n",
                  s.name.c_str(), static_cast<unsigned long long>(s.mac_count),
                  static_cast<unsigned long long>(s.elementwise_count),
                  static_cast<unsigned long long>(s.initiation_interval),
                  static_cast<unsigned long long>(s.stage_latency));
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "total_latency_cycles=%llu\nclock_hz=%.6g\nlatency_seconds=%.9g\n"
                "throughput_inf_per_s=%.6g\nrealtime_ok=%s\n",
                static_cast<unsigned long long>(r.total_latency_cycles),
                r.clock_hz, r.latency_seconds, r.throughput_inf_per_s,
                r.realtime_ok ? "true" : "false");
  out += buf;
  return out;
}

double reference_ratio(const PipelineReport& r) {
  return static_cast<double>(r.total_latency_cycles) /
         static_cast<double>(kReferenceLatencyCycles);
}

std::string compare_to_reference(const PipelineReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "model_cycles=%llu reference_cycles=%llu ratio=%.2f "
                "(reference: 107.5 us measured at 100 MHz)\n",
                static_cast<unsigned long long>(r.total_latency_cycles),
                static_cast<unsigned long long>(kReferenceLatencyCycles),
                reference_ratio(r));
  return buf;
}

}  // namespace gatecnn
