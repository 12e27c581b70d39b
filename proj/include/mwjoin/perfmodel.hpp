#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mwjoin/hash.hpp"
#include "mwjoin/machine.hpp"

namespace mwjoin {

// Symbolic problem shape for the closed-form cost functions and the loop-tree
// model. Sizes are tuple counts; M is the on-chip tuple capacity.
struct CostInputs {
  double sizeR = 0;
  double sizeS = 0;
  double sizeT = 0;
  double M = 1;
  double d = 1;
  double H = 1;
  double G = 1;
};

// ---------------------------------------------------------------------------
// Tuples-read cost functions
// ---------------------------------------------------------------------------

// Linear 3-way join: |R| + |S| + |R||T|/M (real-valued).
double tuples_read_linear(const CostInputs& in);

// Cyclic 3-way join at a given H: |R| + H|S| + |R||T|/(M*H).
double cyclic_cost(const CostInputs& in);
// H minimizing cyclic_cost: sqrt(|R||T| / (M|S|)).
double optimal_H(const CostInputs& in);
// Cost at the optimum: |R| + 2*sqrt(|R||S||T|/M).
double cyclic_min_cost(const CostInputs& in);

// Expected size of R x S under uniform keys with d distinct values.
double intermediate_size(double sizeR, double sizeS, double d);

// Exact integer forms of the per-strategy read counts at a concrete plan,
// matching the engine's dram_tuples_read when every bucket is visited.
uint64_t linear_reads_planned(uint64_t R, uint64_t S, uint64_t T, uint32_t H_bkt);
uint64_t cyclic_reads_planned(uint64_t R, uint64_t S, uint64_t T,
                              uint32_t H_bkt, uint32_t G_bkt);
uint64_t star_reads_planned(uint64_t R, uint64_t S, uint64_t T);

// ---------------------------------------------------------------------------
// Loop-tree runtime model
// ---------------------------------------------------------------------------

enum class Strategy { Linear3, Cyclic3, Star3, CascadedSelf, CascadedStar };

Strategy parse_strategy(const std::string& name); // throws on unknown
std::string strategy_name(Strategy s);

enum class Construct {
  Sequential, // children run back to back, repeated `trips` times
  Parallel,   // like Sequential but trips are divided by parallel_by
  Pipeline,   // inner stages overlap across outer iterations (tile prefetch)
  Streaming,  // fine-grained producer/consumer; bounded by the slowest stage
};

enum class LeafKind {
  None,        // interior node
  Compute,     // `ops` element comparisons, executed L-wide per unit
  FixedCycles, // raw cycle cost
  DramRead,    // `bytes` moved on-chip in `requests` requests
  DramWrite,   // `bytes` moved off-chip
};

struct LoopNode {
  std::string label;        // stage name; also the bottleneck label
  double trips = 1;         // iteration count, may be a fractional expectation
  Construct construct = Construct::Sequential;
  double parallel_by = 1;   // Parallel only
  double branch_prob = 1;   // probability the subtree executes per trip
  LeafKind leaf = LeafKind::None;
  double ops = 0;           // Compute: operations per execution
  bool is_comparison = true; // Compute: whether ops count as key comparisons
  double cycles = 0;        // FixedCycles: cycles per execution
  double bytes = 0;         // Dram*: bytes per execution
  double requests = 1;      // Dram*: request count (granularity charging)
  double tuples = 0;        // Dram reads in a join phase: tuples per execution
  bool use_ssd = false;     // Dram*: charge at ssd_bw (spilled intermediate)
  std::vector<LoopNode> children;
};

struct RuntimeEstimate {
  double cycles = 0;
  double seconds = 0;
  std::string bottleneck;
  double partition_cycles = 0;
  double join1_cycles = 0;
  double join2_cycles = 0;
};

// Builds the loop tree for a strategy. Leaf volumes use expected (fractional)
// bucket sizes; data-dependent branches carry probabilities. The root is a
// Sequential node whose children are the phases "partition", "join1" and,
// for cascades, "join2". Cyclic3 has no loop-tree model and throws.
LoopNode build_loop_tree(Strategy s, const CostInputs& in, const HashPlan& plan,
                         const MachineConfig& cfg);

// Recursive evaluation: Sequential sums, Parallel divides trips, Pipeline
// charges the slowest stage per steady-state iteration plus fill, Streaming
// charges the slowest stage plus the sum of stage latencies. Throws
// std::invalid_argument on malformed trees.
RuntimeEstimate evaluate_runtime(const LoopNode& tree, const MachineConfig& cfg);

// Total tuples crossing DRAM->chip in join phases (sum over read leaves of
// trips-weighted tuple counts); comparable to the engine's dram_tuples_read.
double modeled_tuples_read(const LoopNode& tree);
// Trips-weighted sum over Compute leaves; the nested-loop comparison count.
double modeled_comparisons(const LoopNode& tree);

// Runtime ratio cascaded / 3-way for the same shape. star selects the star
// trees; spill handling follows the shape's intermediate size against
// cfg.dram_capacity_bytes.
double compare_strategies(const CostInputs& shape, const HashPlan& plan3,
                          const HashPlan& plan2, const MachineConfig& cfg,
                          bool star = false);

} // namespace mwjoin
