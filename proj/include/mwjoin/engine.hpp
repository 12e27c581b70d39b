#pragma once

#include <cstdint>
#include <utility>

#include "mwjoin/hash.hpp"
#include "mwjoin/machine.hpp"
#include "mwjoin/types.hpp"

namespace mwjoin {

// Instrumentation counters from a functional run. dram_tuples_read counts
// tuples crossing the DRAM->chip boundary; a broadcast tuple crosses once
// but is delivered to many units, which onchip_broadcasts records.
// comparisons is the nested-loop-equivalent key-comparison count the
// analytical model reasons about; probe_comparisons is the hash-probe count
// the functional implementation actually performed.
struct RunStats {
  uint64_t dram_tuples_read = 0;
  uint64_t onchip_broadcasts = 0;
  uint64_t comparisons = 0;
  uint64_t probe_comparisons = 0;
  uint64_t intermediate_tuples = 0;
  bool spilled = false;

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

using RunResult = std::pair<JoinAggregate, RunStats>;

// Linear 3-way join R(A,B) x S(B,C) x T(C,D). Requires plan.h_bkt == cfg.U
// and H_bkt >= ceil(|R| / effective_M). Every R and S tuple is read once;
// the T bucket for g(C)=j is re-read for every R partition whose S_ij cell
// is non-empty, broadcast to all U units.
RunResult run_linear3(const Relation& R, const Relation& S, const Relation& T,
                      const HashPlan& plan, const MachineConfig& cfg);

// Cyclic 3-way join R(A,B) x S(B,C) x T(C,A) on a sqrt(U) x sqrt(U) grid.
// Requires h_bkt == g_bkt == sqrt(U) and H_bkt*G_bkt >= ceil(|R|/M).
// R is read once; each S partition is read H_bkt times (rows) and each T
// partition G_bkt times (columns).
RunResult run_cyclic3(const Relation& R, const Relation& S, const Relation& T,
                      const HashPlan& plan, const MachineConfig& cfg);

// Star variant of the linear join: R and T fit on-chip simultaneously
// (|R|+|T| <= effective_M, plan.h_bkt*plan.g_bkt == U); S streams once.
// Every tuple is read exactly once.
RunResult run_star3(const Relation& R, const Relation& S, const Relation& T,
                    const HashPlan& plan, const MachineConfig& cfg);

// Cascade of two binary joins with a materialized I(ABC) intermediate.
// Second-level buckets are fixed to U. With star=true, R (then T) is loaded
// wholly on-chip instead of being partitioned. stats.spilled is set when the
// intermediate bytes exceed cfg.dram_capacity_bytes.
RunResult run_cascaded_binary(const Relation& R, const Relation& S,
                              const Relation& T, const HashPlan& plan,
                              const MachineConfig& cfg, bool star = false);

} // namespace mwjoin
