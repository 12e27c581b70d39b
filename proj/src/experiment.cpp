#include "mwjoin/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mwjoin/datagen.hpp"
#include "mwjoin/io.hpp"
#include "mwjoin/oracle.hpp"

namespace mwjoin {

Shape parse_shape(const std::string& name) {
  if (name == "self-linear") return Shape::SelfLinear;
  if (name == "cyclic") return Shape::Cyclic;
  if (name == "star") return Shape::Star;
  throw std::invalid_argument("unknown shape: " + name);
}

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::SelfLinear: return "self-linear";
    case Shape::Cyclic: return "cyclic";
    case Shape::Star: return "star";
  }
  throw std::invalid_argument("unknown shape");
}

namespace {

struct Sizes {
  uint64_t R, S, T;
};

Sizes shape_sizes(const ExperimentSpec& spec) {
  switch (spec.shape) {
    case Shape::SelfLinear:
    case Shape::Cyclic: return {spec.n, spec.n, spec.n};
    case Shape::Star: return {spec.k, spec.n, spec.k};
  }
  throw std::invalid_argument("unknown shape");
}

uint64_t ceil_div(uint64_t a, uint64_t b) { return b ? (a + b - 1) / b : a ? ~0ull : 0; }

uint32_t next_pow2(uint64_t v) {
  uint64_t p = 1;
  while (p < v) p <<= 1;
  return static_cast<uint32_t>(std::min<uint64_t>(p, 1u << 30));
}

void check_strategy_shape(const ExperimentSpec& spec, Strategy strategy) {
  bool cyclic_shape = spec.shape == Shape::Cyclic;
  bool cyclic_strategy = strategy == Strategy::Cyclic3;
  if (cyclic_shape != cyclic_strategy)
    throw std::invalid_argument(
        "strategy " + strategy_name(strategy) + " does not apply to shape " +
        shape_name(spec.shape));
}

} // namespace

RelationSet make_relations(const ExperimentSpec& spec) {
  Sizes sz = shape_sizes(spec);
  // Per-relation seeds keep R, S, T distinct but reproducible.
  DataProfile pr{sz.R, spec.d, spec.seed};
  DataProfile ps{sz.S, spec.d, spec.seed + 1};
  DataProfile pt{sz.T, spec.d, spec.seed + 2};
  RelationSet rels;
  rels.R = generate_relation(pr, {Role::A, Role::B}, "R");
  rels.S = generate_relation(ps, {Role::B, Role::C}, "S");
  Role t_second = spec.shape == Shape::Cyclic ? Role::A : Role::D;
  rels.T = generate_relation(pt, {Role::C, t_second}, "T");
  return rels;
}

HashPlan resolve_plan(const ExperimentSpec& spec, Strategy strategy) {
  check_strategy_shape(spec, strategy);
  const MachineConfig& cfg = spec.machine;
  const uint64_t M = effective_M(cfg, kTupleBytes);
  const Sizes sz = shape_sizes(spec);
  HashPlan plan;
  plan.h_bkt = cfg.U;
  plan.g_bkt = 1;
  plan.f_bkt = 1;

  switch (strategy) {
    case Strategy::Linear3: {
      plan.H_bkt = std::max<uint32_t>(1, static_cast<uint32_t>(ceil_div(sz.R, M)));
      plan.g_bkt = next_pow2(std::max<uint64_t>(1, ceil_div(sz.S, 64ull * plan.H_bkt)));
      break;
    }
    case Strategy::Cyclic3: {
      uint32_t side = static_cast<uint32_t>(std::lround(std::sqrt(cfg.U)));
      plan.h_bkt = plan.g_bkt = side;
      uint64_t parts = ceil_div(sz.R, M);
      uint32_t k = 1;
      while (static_cast<uint64_t>(k) * k < parts) ++k;
      plan.H_bkt = plan.G_bkt = k;
      plan.f_bkt = next_pow2(std::max<uint64_t>(1, ceil_div(sz.S, 64ull * plan.G_bkt)));
      break;
    }
    case Strategy::Star3: {
      uint32_t side = static_cast<uint32_t>(std::lround(std::sqrt(cfg.U)));
      if (side * side == cfg.U) {
        plan.h_bkt = plan.g_bkt = side;
      } else {
        plan.h_bkt = cfg.U;
        plan.g_bkt = 1;
      }
      break;
    }
    case Strategy::CascadedSelf: {
      plan.H_bkt = std::max<uint32_t>(1, static_cast<uint32_t>(ceil_div(sz.R, M)));
      plan.G_bkt = std::max<uint32_t>(1, static_cast<uint32_t>(ceil_div(sz.T, M)));
      break;
    }
    case Strategy::CascadedStar: {
      plan.H_bkt = 1;
      plan.G_bkt = 1;
      break;
    }
  }

  if (spec.H_bkt) plan.H_bkt = *spec.H_bkt;
  if (spec.G_bkt) plan.G_bkt = *spec.G_bkt;
  if (spec.g_bkt) {
    plan.g_bkt = *spec.g_bkt;
    // A star plan keeps h*g == U unless h is pinned too.
    if (strategy == Strategy::Star3 && !spec.h_bkt) {
      if (*spec.g_bkt == 0 || cfg.U % *spec.g_bkt != 0)
        throw std::invalid_argument("star g_bkt must divide U");
      plan.h_bkt = cfg.U / *spec.g_bkt;
    }
  }
  if (spec.h_bkt) plan.h_bkt = *spec.h_bkt;
  if (spec.f_bkt) plan.f_bkt = *spec.f_bkt;
  plan.validate();
  return plan;
}

CostInputs cost_inputs(const ExperimentSpec& spec, Strategy strategy) {
  Sizes sz = shape_sizes(spec);
  HashPlan plan = resolve_plan(spec, strategy);
  CostInputs in;
  in.sizeR = static_cast<double>(sz.R);
  in.sizeS = static_cast<double>(sz.S);
  in.sizeT = static_cast<double>(sz.T);
  in.M = static_cast<double>(effective_M(spec.machine, kTupleBytes));
  in.d = static_cast<double>(spec.d);
  in.H = plan.H_bkt;
  in.G = plan.G_bkt;
  return in;
}

RunOutcome run_one(const ExperimentSpec& spec, Strategy strategy, bool verify) {
  return run_one(spec, strategy, verify, make_relations(spec));
}

RunOutcome run_one(const ExperimentSpec& spec, Strategy strategy, bool verify,
                   const RelationSet& rels) {
  RunOutcome out;
  out.strategy = strategy;
  out.plan = resolve_plan(spec, strategy);
  switch (strategy) {
    case Strategy::Linear3:
      std::tie(out.aggregate, out.stats) =
          run_linear3(rels.R, rels.S, rels.T, out.plan, spec.machine);
      break;
    case Strategy::Cyclic3:
      std::tie(out.aggregate, out.stats) =
          run_cyclic3(rels.R, rels.S, rels.T, out.plan, spec.machine);
      break;
    case Strategy::Star3:
      std::tie(out.aggregate, out.stats) =
          run_star3(rels.R, rels.S, rels.T, out.plan, spec.machine);
      break;
    case Strategy::CascadedSelf:
      std::tie(out.aggregate, out.stats) = run_cascaded_binary(
          rels.R, rels.S, rels.T, out.plan, spec.machine, false);
      break;
    case Strategy::CascadedStar:
      std::tie(out.aggregate, out.stats) = run_cascaded_binary(
          rels.R, rels.S, rels.T, out.plan, spec.machine, true);
      break;
  }
  if (verify && rels.total() <= spec.oracle_limit) {
    JoinAggregate expect = strategy == Strategy::Cyclic3
                               ? oracle_cyclic3(rels.R, rels.S, rels.T)
                               : oracle_linear3(rels.R, rels.S, rels.T);
    out.verified = (expect == out.aggregate);
  }
  return out;
}

ModelOutcome model_one(const ExperimentSpec& spec, Strategy strategy) {
  ModelOutcome out;
  out.strategy = strategy;
  out.plan = resolve_plan(spec, strategy);
  out.tree = build_loop_tree(strategy, cost_inputs(spec, strategy), out.plan,
                             spec.machine);
  out.estimate = evaluate_runtime(out.tree, spec.machine);
  return out;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "H_bkt") return SweepAxis::H_bkt;
  if (name == "g_bkt") return SweepAxis::g_bkt;
  if (name == "dram_bw") return SweepAxis::dram_bw;
  if (name == "N") return SweepAxis::N;
  if (name == "d") return SweepAxis::d;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

namespace {

const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::H_bkt: return "H_bkt";
    case SweepAxis::g_bkt: return "g_bkt";
    case SweepAxis::dram_bw: return "dram_bw";
    case SweepAxis::N: return "N";
    case SweepAxis::d: return "d";
  }
  return "?";
}

ExperimentSpec apply_axis(const ExperimentSpec& spec, SweepAxis axis,
                          double value) {
  ExperimentSpec s = spec;
  switch (axis) {
    case SweepAxis::H_bkt: s.H_bkt = static_cast<uint32_t>(value); break;
    case SweepAxis::g_bkt: s.g_bkt = static_cast<uint32_t>(value); break;
    case SweepAxis::dram_bw: s.machine.dram_bw = value; break;
    case SweepAxis::N: s.n = static_cast<uint64_t>(value); break;
    case SweepAxis::d: s.d = static_cast<uint64_t>(value); break;
  }
  return s;
}

} // namespace

std::vector<SweepRow> sweep(const ExperimentSpec& spec, Strategy strategy,
                            SweepAxis axis, const std::vector<double>& values,
                            bool with_engine) {
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    ExperimentSpec point = apply_axis(spec, axis, v);
    SweepRow row;
    row.value = v;
    row.estimate = model_one(point, strategy).estimate;
    if (with_engine) row.engine = run_one(point, strategy, false).stats;
    rows.push_back(std::move(row));
  }
  return rows;
}

HashPlan best_plan_threeway(const ExperimentSpec& spec,
                            const MachineConfig& cfg) {
  ExperimentSpec s = spec;
  s.machine = cfg;
  const bool star = spec.shape == Shape::Star;
  Strategy strategy = star ? Strategy::Star3 : Strategy::Linear3;
  HashPlan best = resolve_plan(s, strategy);
  double best_cycles =
      evaluate_runtime(build_loop_tree(strategy, cost_inputs(s, strategy), best, cfg), cfg)
          .cycles;
  CostInputs in = cost_inputs(s, strategy);

  auto consider = [&](const HashPlan& cand) {
    double cycles =
        evaluate_runtime(build_loop_tree(strategy, in, cand, cfg), cfg).cycles;
    if (cycles < best_cycles) {
      best_cycles = cycles;
      best = cand;
    }
  };

  if (star) {
    for (uint32_t h = 1; h <= cfg.U; h <<= 1) {
      if (cfg.U % h != 0) continue;
      HashPlan cand = best;
      cand.h_bkt = h;
      cand.g_bkt = cfg.U / h;
      consider(cand);
    }
  } else {
    uint64_t M = effective_M(cfg, kTupleBytes);
    uint32_t h_min = std::max<uint32_t>(1, static_cast<uint32_t>(ceil_div(spec.n, M)));
    for (uint32_t H = next_pow2(h_min); H <= next_pow2(h_min) * 64u; H <<= 1) {
      for (uint32_t g = 1; g <= (1u << 20); g <<= 1) {
        HashPlan cand;
        cand.h_bkt = cfg.U;
        cand.H_bkt = H;
        cand.g_bkt = g;
        consider(cand);
      }
    }
  }
  return best;
}

HashPlan best_plan_cascaded(const ExperimentSpec& spec,
                            const MachineConfig& cfg) {
  ExperimentSpec s = spec;
  s.machine = cfg;
  const bool star = spec.shape == Shape::Star;
  Strategy strategy = star ? Strategy::CascadedStar : Strategy::CascadedSelf;
  HashPlan best = resolve_plan(s, strategy);
  if (star) return best; // the star cascade has no free bucket counts
  CostInputs in = cost_inputs(s, strategy);
  double best_cycles =
      evaluate_runtime(build_loop_tree(strategy, in, best, cfg), cfg).cycles;
  uint64_t M = effective_M(cfg, kTupleBytes);
  uint32_t h_min = std::max<uint32_t>(1, static_cast<uint32_t>(ceil_div(spec.n, M)));
  for (uint32_t H = next_pow2(h_min); H <= next_pow2(h_min) * 64u; H <<= 1) {
    for (uint32_t G = next_pow2(h_min); G <= next_pow2(h_min) * 64u; G <<= 1) {
      HashPlan cand;
      cand.h_bkt = cfg.U;
      cand.H_bkt = H;
      cand.G_bkt = G;
      double cycles =
          evaluate_runtime(build_loop_tree(strategy, in, cand, cfg), cfg).cycles;
      if (cycles < best_cycles) {
        best_cycles = cycles;
        best = cand;
      }
    }
  }
  return best;
}

std::vector<CompareRow> compare(const ExperimentSpec& spec,
                                const std::vector<double>& bandwidths,
                                const std::vector<uint64_t>& n_values) {
  if (spec.shape == Shape::Cyclic)
    throw std::invalid_argument(
        "compare supports the self-linear and star shapes");
  const bool star = spec.shape == Shape::Star;
  std::vector<uint64_t> ns = n_values.empty()
                                 ? std::vector<uint64_t>{spec.n}
                                 : n_values;
  std::vector<double> bws = bandwidths.empty()
                                ? std::vector<double>{spec.machine.dram_bw}
                                : bandwidths;
  std::vector<CompareRow> rows;
  for (uint64_t n : ns) {
    for (double bw : bws) {
      ExperimentSpec point = spec;
      point.n = n;
      point.machine.dram_bw = bw;
      CompareRow row;
      row.n = n;
      row.d = spec.d;
      row.dram_bw = bw;
      row.plan3 = best_plan_threeway(point, point.machine);
      row.plan2 = best_plan_cascaded(point, point.machine);
      Strategy s3 = star ? Strategy::Star3 : Strategy::Linear3;
      Strategy s2 = star ? Strategy::CascadedStar : Strategy::CascadedSelf;
      CostInputs in = cost_inputs(point, s3);
      double t3 =
          evaluate_runtime(build_loop_tree(s3, in, row.plan3, point.machine),
                           point.machine)
              .cycles;
      double t2 =
          evaluate_runtime(build_loop_tree(s2, in, row.plan2, point.machine),
                           point.machine)
              .cycles;
      row.threeway_cycles = t3;
      row.cascaded_cycles = t2;
      row.speedup = t2 / t3;
      row.spilled = intermediate_size(in.sizeR, in.sizeS, in.d) *
                        kIntermediateTupleBytes >
                    static_cast<double>(point.machine.dram_capacity_bytes);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string config_header(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["shape"] = shape_name(spec.shape);
  j["n"] = spec.n;
  j["d"] = spec.d;
  j["k"] = spec.k;
  j["seed"] = spec.seed;
  j["machine"] = spec.machine;
  std::ostringstream out;
  out << "# config " << j.dump() << "\n";
  return out.str();
}

} // namespace

std::string sweep_csv(const ExperimentSpec& spec, Strategy strategy,
                      SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << config_header(spec);
  nlohmann::json jp = resolve_plan(spec, strategy);
  out << "# strategy " << strategy_name(strategy) << " base_plan " << jp.dump()
      << "\n";
  out << axis_name(axis)
      << ",cycles,seconds,partition_cycles,join1_cycles,join2_cycles,"
         "bottleneck";
  bool with_engine = !rows.empty() && rows.front().engine.has_value();
  if (with_engine)
    out << ",dram_tuples_read,onchip_broadcasts,comparisons,"
           "intermediate_tuples,spilled";
  out << "\n";
  for (const SweepRow& r : rows) {
    out << r.value << ',' << r.estimate.cycles << ',' << r.estimate.seconds
        << ',' << r.estimate.partition_cycles << ',' << r.estimate.join1_cycles
        << ',' << r.estimate.join2_cycles << ',' << r.estimate.bottleneck;
    if (r.engine) {
      out << ',' << r.engine->dram_tuples_read << ','
          << r.engine->onchip_broadcasts << ',' << r.engine->comparisons << ','
          << r.engine->intermediate_tuples << ','
          << (r.engine->spilled ? 1 : 0);
    }
    out << "\n";
  }
  return out.str();
}

std::string compare_csv(const ExperimentSpec& spec,
                        const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << config_header(spec);
  out << "N,d,dram_bw,threeway_cycles,cascaded_cycles,speedup,spilled,"
         "plan3_H,plan3_g,plan3_h,plan2_H,plan2_G\n";
  for (const CompareRow& r : rows) {
    out << r.n << ',' << r.d << ',' << r.dram_bw << ',' << r.threeway_cycles
        << ',' << r.cascaded_cycles << ',' << r.speedup << ','
        << (r.spilled ? 1 : 0) << ',' << r.plan3.H_bkt << ',' << r.plan3.g_bkt
        << ',' << r.plan3.h_bkt << ',' << r.plan2.H_bkt << ','
        << r.plan2.G_bkt << "\n";
  }
  return out.str();
}

} // namespace mwjoin
