#include "mwjoin/perfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mwjoin {

// ---------------------------------------------------------------------------
// Cost formulas
// ---------------------------------------------------------------------------

double tuples_read_linear(const CostInputs& in) {
  if (in.M <= 0) throw std::invalid_argument("M must be >= 1");
  return in.sizeR + in.sizeS + in.sizeR * in.sizeT / in.M;
}

double cyclic_cost(const CostInputs& in) {
  if (in.M <= 0 || in.sizeR <= 0 || in.sizeS <= 0 || in.sizeT <= 0)
    throw std::invalid_argument("cyclic cost needs positive sizes and M");
  if (in.H <= 0) throw std::invalid_argument("H must be positive");
  return in.sizeR + in.H * in.sizeS + in.sizeR * in.sizeT / (in.M * in.H);
}

double optimal_H(const CostInputs& in) {
  if (in.M <= 0 || in.sizeR <= 0 || in.sizeS <= 0 || in.sizeT <= 0)
    throw std::invalid_argument("optimal H needs positive sizes and M");
  return std::sqrt(in.sizeR * in.sizeT / (in.M * in.sizeS));
}

double cyclic_min_cost(const CostInputs& in) {
  if (in.M <= 0 || in.sizeR <= 0 || in.sizeS <= 0 || in.sizeT <= 0)
    throw std::invalid_argument("cyclic cost needs positive sizes and M");
  return in.sizeR + 2.0 * std::sqrt(in.sizeR * in.sizeS * in.sizeT / in.M);
}

double intermediate_size(double sizeR, double sizeS, double d) {
  if (d <= 0) throw std::invalid_argument("d must be >= 1");
  return (sizeR / d) * sizeS;
}

uint64_t linear_reads_planned(uint64_t R, uint64_t S, uint64_t T,
                              uint32_t H_bkt) {
  return R + S + static_cast<uint64_t>(H_bkt) * T;
}

uint64_t cyclic_reads_planned(uint64_t R, uint64_t S, uint64_t T,
                              uint32_t H_bkt, uint32_t G_bkt) {
  return R + static_cast<uint64_t>(H_bkt) * S +
         static_cast<uint64_t>(G_bkt) * T;
}

uint64_t star_reads_planned(uint64_t R, uint64_t S, uint64_t T) {
  return R + S + T;
}

// ---------------------------------------------------------------------------
// Loop-tree construction
// ---------------------------------------------------------------------------

Strategy parse_strategy(const std::string& name) {
  if (name == "linear3") return Strategy::Linear3;
  if (name == "cyclic3") return Strategy::Cyclic3;
  if (name == "star3") return Strategy::Star3;
  if (name == "cascaded") return Strategy::CascadedSelf;
  if (name == "cascaded-star") return Strategy::CascadedStar;
  throw std::invalid_argument("unknown strategy: " + name);
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Linear3: return "linear3";
    case Strategy::Cyclic3: return "cyclic3";
    case Strategy::Star3: return "star3";
    case Strategy::CascadedSelf: return "cascaded";
    case Strategy::CascadedStar: return "cascaded-star";
  }
  throw std::invalid_argument("unknown strategy");
}

namespace {

LoopNode compute_leaf(std::string label, double ops, bool is_comparison = true) {
  LoopNode n;
  n.label = std::move(label);
  n.leaf = LeafKind::Compute;
  n.ops = ops;
  n.is_comparison = is_comparison;
  return n;
}

LoopNode dram_read(std::string label, double bytes, double requests,
                   double tuples, bool use_ssd = false) {
  LoopNode n;
  n.label = std::move(label);
  n.leaf = LeafKind::DramRead;
  n.bytes = bytes;
  n.requests = std::max(1.0, requests);
  n.tuples = tuples;
  n.use_ssd = use_ssd;
  return n;
}

LoopNode dram_write(std::string label, double bytes, bool use_ssd = false) {
  LoopNode n;
  n.label = std::move(label);
  n.leaf = LeafKind::DramWrite;
  n.bytes = bytes;
  n.use_ssd = use_ssd;
  return n;
}

LoopNode interior(std::string label, double trips, Construct c,
                  std::vector<LoopNode> children) {
  LoopNode n;
  n.label = std::move(label);
  n.trips = trips;
  n.construct = c;
  n.children = std::move(children);
  return n;
}

LoopNode seq(std::string label, double trips, std::vector<LoopNode> children) {
  return interior(std::move(label), trips, Construct::Sequential,
                  std::move(children));
}

// A tile loop: overlapped prefetch when the machine double-buffers, plain
// sequential execution otherwise.
LoopNode tile_loop(std::string label, double trips,
                   std::vector<LoopNode> children, const MachineConfig& cfg) {
  return interior(std::move(label), trips,
                  cfg.double_buffered ? Construct::Pipeline
                                      : Construct::Sequential,
                  std::move(children));
}

LoopNode stream(std::string label, std::vector<LoopNode> children) {
  return interior(std::move(label), 1.0, Construct::Streaming,
                  std::move(children));
}

LoopNode par(std::string label, double trips, double by,
             std::vector<LoopNode> children) {
  LoopNode n = interior(std::move(label), trips, Construct::Parallel,
                        std::move(children));
  n.parallel_by = by;
  return n;
}

LoopNode branch(std::string label, double prob, double trips, LoopNode child) {
  LoopNode n = seq(std::move(label), trips, {std::move(child)});
  n.branch_prob = std::min(1.0, prob);
  return n;
}

// One radix pass over a relation: a streamed read and a streamed write of the
// whole relation, concurrently at DRAM bandwidth.
LoopNode partition_pass(const std::string& rel, double bytes) {
  return stream("part_" + rel,
                {dram_read("part_read_" + rel, bytes, 1, 0),
                 dram_write("part_write_" + rel, bytes)});
}

double tuple_bytes(double tuples) { return tuples * kTupleBytes; }

LoopNode build_linear3(const CostInputs& in, const HashPlan& plan,
                       const MachineConfig& cfg) {
  const double R = in.sizeR, S = in.sizeS, T = in.sizeT;
  const double H = plan.H_bkt, g = plan.g_bkt, h = plan.h_bkt;
  const double d = std::max(1.0, in.d);

  std::vector<LoopNode> passes;
  if (plan.H_bkt > 1) {
    passes.push_back(partition_pass("R", tuple_bytes(R)));
    passes.push_back(partition_pass("S1", tuple_bytes(S)));
  }
  if (plan.g_bkt > 1) {
    passes.push_back(partition_pass("S2", tuple_bytes(S)));
    passes.push_back(partition_pass("T", tuple_bytes(T)));
  }

  // Per (i, j): the streamed T bucket is compared against the local S piece;
  // pairs agreeing on C are then compared against the local R fragment.
  double st_pairs_per_unit = (T / g) * (S / (H * g * h));
  LoopNode join_inner = stream(
      "stream_T_join",
      {dram_read("stream_T", tuple_bytes(T / g), 1, T / g),
       par("pmu_join", h, cfg.U,
           {compute_leaf("comp", st_pairs_per_unit),
            branch("branch_SC_eq_TC", g / d, st_pairs_per_unit,
                   compute_leaf("comp_R", R / (H * h)))})});

  LoopNode bucket_loop = tile_loop(
      "g_buckets", g,
      {dram_read("load_S", tuple_bytes(S / (H * g)), h, S / (H * g)),
       std::move(join_inner)},
      cfg);

  LoopNode join1 = tile_loop(
      "join1", H,
      {dram_read("load_R", tuple_bytes(R / H), 1, R / H),
       std::move(bucket_loop)},
      cfg);

  LoopNode part = seq("partition", 1, std::move(passes));
  return seq("root", 1, {std::move(part), std::move(join1)});
}

LoopNode build_star3(const CostInputs& in, const HashPlan& plan,
                     const MachineConfig& cfg) {
  const double R = in.sizeR, S = in.sizeS, T = in.sizeT;
  const double h = plan.h_bkt, g = plan.g_bkt;
  const double d = std::max(1.0, in.d);
  const double U = cfg.U;

  double rs_pairs_per_unit = (S / U) * (R / h);
  LoopNode join1 = seq(
      "join1", 1,
      {dram_read("load_R", tuple_bytes(R), 1, R),
       dram_read("load_T", tuple_bytes(T), 1, T),
       stream("stream_S_join",
              {dram_read("stream_S", tuple_bytes(S), 1, S),
               par("pmu_join", U, U,
                   {compute_leaf("comp", rs_pairs_per_unit),
                    branch("branch_RB_eq_SB", h / d, rs_pairs_per_unit,
                           compute_leaf("comp_T", T / g))})})});

  LoopNode part = seq("partition", 1, {});
  return seq("root", 1, {std::move(part), std::move(join1)});
}

LoopNode build_cascaded(const CostInputs& in, const HashPlan& plan,
                        const MachineConfig& cfg, bool star) {
  const double R = in.sizeR, S = in.sizeS, T = in.sizeT;
  const double d = std::max(1.0, in.d);
  const double U = cfg.U;
  const double H = star ? 1.0 : plan.H_bkt;
  const double G = star ? 1.0 : plan.G_bkt;
  const double I = intermediate_size(R, S, d);
  const double i_bytes = I * kIntermediateTupleBytes;
  const bool spill =
      i_bytes > static_cast<double>(cfg.dram_capacity_bytes);

  std::vector<LoopNode> passes;
  if (!star && plan.H_bkt > 1) {
    passes.push_back(partition_pass("R", tuple_bytes(R)));
    passes.push_back(partition_pass("S", tuple_bytes(S)));
  }
  if (!star && plan.G_bkt > 1) {
    passes.push_back(partition_pass("RS", i_bytes));
    passes.push_back(partition_pass("T", tuple_bytes(T)));
  }

  double rs_pairs_per_unit = (S / (H * U)) * (R / (H * U));
  LoopNode join1 = tile_loop(
      "join1", H,
      {dram_read("load_R", tuple_bytes(R / H), 1, R / H),
       stream("stream_S_join1",
              {dram_read("stream_S", tuple_bytes(S / H), 1, S / H),
               par("pmu_join1", U, U,
                   {compute_leaf("comp", rs_pairs_per_unit),
                    branch("branch_RB_eq_SB", U / d, rs_pairs_per_unit,
                           compute_leaf("emit", 1.0, false))}),
               dram_write("store_RS", i_bytes / H, spill)})},
      cfg);

  double it_pairs_per_unit = (I / (G * U)) * (T / (G * U));
  LoopNode join2 = tile_loop(
      "join2", G,
      {dram_read("load_T", tuple_bytes(T / G), 1, T / G),
       stream("stream_I_join2",
              {dram_read("stream_RS", i_bytes / G, 1, I / G, spill),
               par("pmu_join2", U, U,
                   {compute_leaf("comp", it_pairs_per_unit)})})},
      cfg);

  LoopNode part = seq("partition", 1, std::move(passes));
  return seq("root", 1,
             {std::move(part), std::move(join1), std::move(join2)});
}

} // namespace

LoopNode build_loop_tree(Strategy s, const CostInputs& in, const HashPlan& plan,
                         const MachineConfig& cfg) {
  plan.validate();
  switch (s) {
    case Strategy::Linear3: return build_linear3(in, plan, cfg);
    case Strategy::Star3: return build_star3(in, plan, cfg);
    case Strategy::CascadedSelf: return build_cascaded(in, plan, cfg, false);
    case Strategy::CascadedStar: return build_cascaded(in, plan, cfg, true);
    case Strategy::Cyclic3:
      throw std::invalid_argument(
          "cyclic3 is covered by the tuples-read cost functions only");
  }
  throw std::invalid_argument("unknown strategy");
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

struct StageTime {
  double cycles = 0;
  double latency = 0;
};

struct EvalCtx {
  double dram_bpc;    // DRAM bytes per cycle
  double ssd_bpc;     // SSD bytes per cycle
  double resp_cycles; // DRAM response latency
  double compute_lat; // network + PCU pipeline latency
  double lanes;
  double granule;
  std::map<std::string, double>* stage_cycles = nullptr;
  bool in_join_phase = false;
};

void validate_node(const LoopNode& n) {
  if (!(n.trips >= 0)) throw std::invalid_argument("negative loop trip count");
  if (!(n.branch_prob >= 0.0 && n.branch_prob <= 1.0))
    throw std::invalid_argument("branch probability out of [0,1]");
  if (!(n.parallel_by > 0))
    throw std::invalid_argument("parallelism must be positive");
  if (!(n.ops >= 0) || !(n.bytes >= 0) || !(n.cycles >= 0) ||
      !(n.requests > 0))
    throw std::invalid_argument("negative leaf cost");
  if (n.leaf == LeafKind::None && n.children.empty() && n.construct != Construct::Sequential && n.construct != Construct::Parallel)
    throw std::invalid_argument("composite node without children");
}

double charged_bytes(const LoopNode& n, const EvalCtx& ctx) {
  // Requests below the DRAM granule still occupy a full granule of bandwidth.
  double per_request = n.bytes / n.requests;
  return n.requests * std::max(per_request, ctx.granule);
}

StageTime eval_node(const LoopNode& n, EvalCtx& ctx, double attribution) {
  validate_node(n);
  StageTime out;
  const double self_mult =
      n.branch_prob * n.trips /
      (n.construct == Construct::Parallel ? n.parallel_by : 1.0);

  if (n.leaf != LeafKind::None) {
    double base = 0;
    switch (n.leaf) {
      case LeafKind::Compute:
        base = n.ops / ctx.lanes;
        out.latency = ctx.compute_lat;
        break;
      case LeafKind::FixedCycles:
        base = n.cycles;
        break;
      case LeafKind::DramRead:
      case LeafKind::DramWrite:
        base = charged_bytes(n, ctx) / (n.use_ssd ? ctx.ssd_bpc : ctx.dram_bpc);
        out.latency = ctx.resp_cycles;
        break;
      default:
        break;
    }
    out.cycles = self_mult * base;
    if (ctx.stage_cycles && ctx.in_join_phase && !n.label.empty())
      (*ctx.stage_cycles)[n.label] += attribution * out.cycles;
    return out;
  }

  std::vector<StageTime> stages;
  stages.reserve(n.children.size());
  for (const LoopNode& c : n.children)
    stages.push_back(eval_node(c, ctx, attribution * self_mult));

  double sum = 0, maxc = 0, lat = 0;
  for (const StageTime& s : stages) {
    sum += s.cycles;
    maxc = std::max(maxc, s.cycles);
    lat += s.latency;
  }
  switch (n.construct) {
    case Construct::Sequential:
    case Construct::Parallel:
      out.cycles = self_mult * sum;
      break;
    case Construct::Pipeline:
      // Steady state is paced by the slowest stage; the remaining stages are
      // paid once as fill.
      out.cycles = n.trips <= 0
                       ? 0.0
                       : n.branch_prob *
                             (std::max(0.0, n.trips - 1.0) * maxc + sum);
      break;
    case Construct::Streaming:
      out.cycles = self_mult * (maxc + lat);
      break;
  }
  out.latency = lat;
  return out;
}

void accumulate_work(const LoopNode& n, double mult, double* tuples,
                     double* comparisons) {
  double m = mult * n.branch_prob * n.trips;
  if (n.leaf == LeafKind::DramRead) *tuples += m * n.tuples;
  if (n.leaf == LeafKind::Compute && n.is_comparison) *comparisons += m * n.ops;
  for (const LoopNode& c : n.children) accumulate_work(c, m, tuples, comparisons);
}

} // namespace

RuntimeEstimate evaluate_runtime(const LoopNode& tree,
                                 const MachineConfig& cfg) {
  if (cfg.clock_hz <= 0 || cfg.dram_bw <= 0 || cfg.ssd_bw <= 0 ||
      cfg.L == 0 || cfg.U == 0)
    throw std::invalid_argument("machine config has non-positive rates");
  EvalCtx ctx;
  ctx.dram_bpc = cfg.dram_bw / cfg.clock_hz;
  ctx.ssd_bpc = cfg.ssd_bw / cfg.clock_hz;
  ctx.resp_cycles = cfg.dram_response_ns * 1e-9 * cfg.clock_hz;
  ctx.compute_lat = cfg.net_latency_cycles + cfg.pcu_latency_cycles;
  ctx.lanes = cfg.L;
  ctx.granule = cfg.dram_granule_bytes;

  std::map<std::string, double> stage_cycles;
  ctx.stage_cycles = &stage_cycles;

  RuntimeEstimate est;
  // The root's phases are evaluated independently so the breakdown is exact.
  if (tree.construct == Construct::Sequential && tree.leaf == LeafKind::None &&
      tree.trips == 1.0) {
    for (const LoopNode& phase : tree.children) {
      ctx.in_join_phase = phase.label != "partition";
      double c = eval_node(phase, ctx, 1.0).cycles;
      if (phase.label == "partition") est.partition_cycles += c;
      else if (phase.label == "join2") est.join2_cycles += c;
      else est.join1_cycles += c;
      est.cycles += c;
    }
  } else {
    ctx.in_join_phase = true;
    est.cycles = eval_node(tree, ctx, 1.0).cycles;
    est.join1_cycles = est.cycles;
  }
  est.seconds = est.cycles / cfg.clock_hz;

  double best = -1;
  for (const auto& [label, cyc] : stage_cycles)
    if (cyc > best) {
      best = cyc;
      est.bottleneck = label;
    }
  return est;
}

double modeled_tuples_read(const LoopNode& tree) {
  double tuples = 0, comparisons = 0;
  accumulate_work(tree, 1.0, &tuples, &comparisons);
  return tuples;
}

double modeled_comparisons(const LoopNode& tree) {
  double tuples = 0, comparisons = 0;
  accumulate_work(tree, 1.0, &tuples, &comparisons);
  return comparisons;
}

double compare_strategies(const CostInputs& shape, const HashPlan& plan3,
                          const HashPlan& plan2, const MachineConfig& cfg,
                          bool star) {
  Strategy three = star ? Strategy::Star3 : Strategy::Linear3;
  Strategy two = star ? Strategy::CascadedStar : Strategy::CascadedSelf;
  RuntimeEstimate t3 =
      evaluate_runtime(build_loop_tree(three, shape, plan3, cfg), cfg);
  RuntimeEstimate t2 =
      evaluate_runtime(build_loop_tree(two, shape, plan2, cfg), cfg);
  if (t3.cycles <= 0) throw std::invalid_argument("degenerate 3-way runtime");
  return t2.cycles / t3.cycles;
}

} // namespace mwjoin
