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

// First-order latency/throughput model of a streaming dataflow accelerator
// running one GateCNN stage per pipeline process.
//
// Each stage has P MAC units and P elementwise units (P = parallelism):
//
//   initiation_interval = ceil(macs / P) + ceil(elementwise / P)
//   stage_latency       = initiation_interval + fill_cycles
//
// where `elementwise` for the pool stage is its compare count. The gate path
// (one time conv) and the content path (time conv + three cascade convs) run
// concurrently, so
//
//   total = fuse + pool + embed + max(gate, content + cascade1..3)
//         + combine + average + classify
//
// and throughput = clock_hz / max(initiation_interval). This is not cycle
// accurate: it ignores FIFO depths, line-buffer warmup and II > 1 loops.

#ifndef GATECNN_DATAFLOW_H_
#define GATECNN_DATAFLOW_H_

#include <cstdint>
#include <string>
#include <vector>

#include "gatecnn/model.h"

namespace gatecnn {

inline constexpr double kDefaultClockHz = 100e6;
inline constexpr std::uint64_t kDefaultFillCycles = 5;
inline constexpr double kRealtimeBudgetSeconds = 0.020;
/// Reference measurement: 107.5 us at 100 MHz.
inline constexpr std::uint64_t kReferenceLatencyCycles = 10750;

struct StageCost {
  std::string name;
  std::uint64_t mac_count = 0;
  std::uint64_t elementwise_count = 0;
  std::uint64_t initiation_interval = 0;
  std::uint64_t stage_latency = 0;
};

struct PipelineReport {
  std::vector<StageCost> stages;
  std::uint64_t total_latency_cycles = 0;
  double clock_hz = kDefaultClockHz;
  double latency_seconds = 0.0;
  double throughput_inf_per_s = 0.0;
  bool realtime_ok = false;
};

struct PipelineOptions {
  std::uint64_t parallelism = 1;  // MACs per cycle per stage
  double clock_hz = kDefaultClockHz;
  std::uint64_t fill_cycles = kDefaultFillCycles;
};

PipelineReport estimate(const GateCNNConfig& cfg,
                        const PipelineOptions& opts = {});

/// Fills latency_seconds, throughput_inf_per_s and realtime_ok from
/// total_latency_cycles, the stages' largest initiation interval and clock_hz.
void finalize_report(PipelineReport& report);

/// Latency of the gate path (gate time conv) and of the content path
/// (content time conv plus the three cascade stages), in cycles.
struct ParallelPaths {
  std::uint64_t gate = 0;
  std::uint64_t content = 0;
};
ParallelPaths parallel_paths(const PipelineReport& report);

std::string format_report(const PipelineReport& report);

/// Model cycles against the 10,750-cycle reference, as text.
std::string compare_to_reference(const PipelineReport& report);
double reference_ratio(const PipelineReport& report);

}  // namespace gatecnn

#endif  // GATECNN_DATAFLOW_H_
