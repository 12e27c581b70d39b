#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mwjoin/engine.hpp"
#include "mwjoin/perfmodel.hpp"

namespace mwjoin {

enum class Shape { SelfLinear, Cyclic, Star };

Shape parse_shape(const std::string& name); // throws on unknown
std::string shape_name(Shape s);

// One experiment: a data shape, optional plan overrides, and a machine
// description. Everything downstream (gen/run/model/sweep/compare) is a pure
// function of this plus the strategy.
struct ExperimentSpec {
  Shape shape = Shape::SelfLinear;
  uint64_t n = 1000;
  uint64_t d = 10;
  uint64_t k = 100; // dimension-relation size, star only
  uint64_t seed = 1;
  std::optional<uint32_t> H_bkt, G_bkt, h_bkt, g_bkt, f_bkt;
  MachineConfig machine;
  uint64_t oracle_limit = 100000; // max total tuples for --verify
};

struct RelationSet {
  Relation R, S, T;
  uint64_t total() const { return R.size() + S.size() + T.size(); }
};

// Deterministic relations for the spec: per-relation seeds are derived from
// spec.seed so R, S, T are distinct but reproducible.
RelationSet make_relations(const ExperimentSpec& spec);

// The default plan for a strategy at this shape: second-level buckets per the
// algorithm (h=U, or sqrt(U) grid, or h*g=U), coarse buckets sized so a
// partition fits on-chip, fine buckets sized for <= 64 expected S tuples per
// bucket. Explicit overrides in the spec win.
HashPlan resolve_plan(const ExperimentSpec& spec, Strategy strategy);

CostInputs cost_inputs(const ExperimentSpec& spec, Strategy strategy);

struct RunOutcome {
  Strategy strategy;
  HashPlan plan;
  JoinAggregate aggregate;
  RunStats stats;
  std::optional<bool> verified; // set when verification was requested
};

RunOutcome run_one(const ExperimentSpec& spec, Strategy strategy, bool verify);
RunOutcome run_one(const ExperimentSpec& spec, Strategy strategy, bool verify,
                   const RelationSet& rels);

struct ModelOutcome {
  Strategy strategy;
  HashPlan plan;
  LoopNode tree;
  RuntimeEstimate estimate;
};

ModelOutcome model_one(const ExperimentSpec& spec, Strategy strategy);

// One sweep point: the axis value plus the model estimate (and engine
// counters when requested).
struct SweepRow {
  double value = 0;
  RuntimeEstimate estimate;
  std::optional<RunStats> engine;
};

enum class SweepAxis { H_bkt, g_bkt, dram_bw, N, d };
SweepAxis parse_axis(const std::string& name); // throws on unknown

std::vector<SweepRow> sweep(const ExperimentSpec& spec, Strategy strategy,
                            SweepAxis axis, const std::vector<double>& values,
                            bool with_engine);

// Best-plan 3-way vs best-plan cascaded comparison at one (N, d, bandwidth).
struct CompareRow {
  uint64_t n = 0;
  uint64_t d = 0;
  double dram_bw = 0;
  double threeway_cycles = 0;
  double cascaded_cycles = 0;
  double speedup = 0; // cascaded / 3-way
  bool spilled = false;
  HashPlan plan3, plan2;
};

std::vector<CompareRow> compare(const ExperimentSpec& spec,
                                const std::vector<double>& bandwidths,
                                const std::vector<uint64_t>& n_values = {});

// Exhaustive power-of-two plan searches used by compare().
HashPlan best_plan_threeway(const ExperimentSpec& spec, const MachineConfig& cfg);
HashPlan best_plan_cascaded(const ExperimentSpec& spec, const MachineConfig& cfg);

// CSV emission; every table starts with '#'-prefixed lines carrying the full
// resolved configuration so outputs are self-describing.
std::string sweep_csv(const ExperimentSpec& spec, Strategy strategy,
                      SweepAxis axis, const std::vector<SweepRow>& rows);
std::string compare_csv(const ExperimentSpec& spec,
                        const std::vector<CompareRow>& rows);

} // namespace mwjoin
