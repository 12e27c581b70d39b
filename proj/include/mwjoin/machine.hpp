#pragma once

#include <cstdint>

#include "mwjoin/types.hpp"

namespace mwjoin {

// Declarative description of the accelerator: a grid of paired memory (PMU)
// and compute (PCU) units fed by DRAM, with optional SSD spill for
// intermediates that outgrow DRAM.
struct MachineConfig {
  uint32_t U = 64;                // memory units (equal number of compute units)
  uint32_t L = 16;                // SIMD lanes per compute unit
  uint64_t onchip_bytes = 16ull << 20; // total scratchpad capacity
  double dram_bw = 49e9;          // bytes/second, each direction
  double ssd_bw = 700e6;          // bytes/second once intermediates spill
  uint64_t dram_capacity_bytes = 251'000'000'000ull; // spill threshold
  uint32_t net_latency_cycles = 24; // worst-case on-chip network latency
  uint32_t pcu_latency_cycles = 6;  // compute-unit pipeline latency
  double clock_hz = 1e9;
  bool double_buffered = true;
  double dram_response_ns = 100.0;  // DRAM response time charged per stream
  uint32_t dram_granule_bytes = 64; // minimum useful DRAM request size
  double peak_tflops = 12.3;        // informational only; not used by the model

  friend bool operator==(const MachineConfig&, const MachineConfig&) = default;
};

MachineConfig default_config();

// On-chip tuple capacity at the given tuple width; halved under double
// buffering because half the scratchpad holds the prefetched next tile.
uint64_t effective_M(const MachineConfig& cfg, uint32_t tuple_width_bytes);

} // namespace mwjoin
