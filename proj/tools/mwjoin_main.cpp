#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mwjoin/experiment.hpp"
#include "mwjoin/io.hpp"
#include "mwjoin/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliState {
  mwjoin::ExperimentSpec spec;
  std::string shape = "self-linear";
  std::string out;
  std::string format = "csv";
};

void add_common_options(CLI::App* cmd, CliState& st) {
  cmd->add_option("--shape", st.shape, "self-linear | cyclic | star");
  cmd->add_option("--n", st.spec.n, "relation size N");
  cmd->add_option("--d", st.spec.d, "distinct values per join column");
  cmd->add_option("--k", st.spec.k, "dimension relation size K (star)");
  cmd->add_option("--seed", st.spec.seed, "RNG seed");
  cmd->add_option("--H-bkt", st.spec.H_bkt, "first-level bucket count H");
  cmd->add_option("--G-bkt", st.spec.G_bkt, "first-level bucket count G");
  cmd->add_option("--h-bkt", st.spec.h_bkt, "unit-level bucket count h");
  cmd->add_option("--g-bkt", st.spec.g_bkt, "fine/unit bucket count g");
  cmd->add_option("--f-bkt", st.spec.f_bkt, "fine bucket count f (cyclic)");
  cmd->add_option("--oracle-limit", st.spec.oracle_limit,
                  "max total tuples for --verify");

  mwjoin::MachineConfig& m = st.spec.machine;
  cmd->add_option("--units", m.U, "memory/compute unit count U");
  cmd->add_option("--lanes", m.L, "SIMD lanes per compute unit L");
  cmd->add_option("--onchip-bytes", m.onchip_bytes, "scratchpad bytes");
  cmd->add_option("--dram-bw", m.dram_bw, "DRAM bytes/s");
  cmd->add_option("--ssd-bw", m.ssd_bw, "SSD bytes/s");
  cmd->add_option("--dram-capacity", m.dram_capacity_bytes,
                  "DRAM capacity bytes (spill threshold)");
  cmd->add_option("--net-latency", m.net_latency_cycles, "network latency");
  cmd->add_option("--pcu-latency", m.pcu_latency_cycles, "PCU latency");
  cmd->add_option("--clock-hz", m.clock_hz, "clock frequency");
  cmd->add_option("--dram-response-ns", m.dram_response_ns,
                  "DRAM response time");
  cmd->add_option("--dram-granule", m.dram_granule_bytes,
                  "minimum useful DRAM request bytes");
  cmd->add_flag("--double-buffered,!--no-double-buffered", m.double_buffered,
                "overlap prefetch with compute (halves usable scratchpad)");

  cmd->add_option("--out", st.out, "output path");
  cmd->add_option("--format", st.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
}

void finish_spec(CliState& st) { st.spec.shape = mwjoin::parse_shape(st.shape); }

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string item = csv.substr(pos, comma - pos);
    if (!item.empty()) out.push_back(std::stod(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void emit(const CliState& st, const std::string& text) {
  if (st.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(st.out);
    if (!f) throw std::runtime_error("cannot open for writing: " + st.out);
    f << text;
    std::cout << "wrote " << st.out << "\n";
  }
}

int cmd_gen(CliState& st) {
  finish_spec(st);
  mwjoin::RelationSet rels = mwjoin::make_relations(st.spec);
  fs::path dir = st.out.empty() ? fs::path(".") : fs::path(st.out);
  fs::create_directories(dir);
  for (const mwjoin::Relation* rel : {&rels.R, &rels.S, &rels.T}) {
    fs::path p = dir / (rel->name + ".csv");
    mwjoin::write_relation_csv(*rel, p.string());
    std::cout << p.string() << " checksum " << mwjoin::file_checksum(p.string())
              << "\n";
  }
  return 0;
}

int cmd_run(CliState& st, const std::string& strategy_name, bool verify,
            const std::string& r_csv, const std::string& s_csv,
            const std::string& t_csv) {
  finish_spec(st);
  mwjoin::Strategy strategy = mwjoin::parse_strategy(strategy_name);
  mwjoin::RunOutcome out;
  if (!r_csv.empty() || !s_csv.empty() || !t_csv.empty()) {
    if (r_csv.empty() || s_csv.empty() || t_csv.empty())
      throw std::invalid_argument("--r, --s and --t must be given together");
    mwjoin::RelationSet rels;
    rels.R = mwjoin::read_relation_csv(r_csv);
    rels.S = mwjoin::read_relation_csv(s_csv);
    rels.T = mwjoin::read_relation_csv(t_csv);
    rels.R.name = "R";
    rels.S.name = "S";
    rels.T.name = "T";
    out = mwjoin::run_one(st.spec, strategy, verify, rels);
  } else {
    out = mwjoin::run_one(st.spec, strategy, verify);
  }

  json j;
  j["strategy"] = strategy_name;
  j["plan"] = out.plan;
  j["stats"] = out.stats;
  j["machine"] = st.spec.machine;
  if (out.verified.has_value()) j["verified"] = *out.verified;
  std::cout << j.dump(2) << "\n";
  if (!st.out.empty()) {
    fs::path dir(st.out);
    fs::create_directories(dir);
    mwjoin::write_aggregate_csv(out.aggregate, (dir / "aggregate.csv").string());
    std::ofstream sj(dir / "stats.json");
    sj << j.dump(2) << "\n";
    std::cout << "wrote " << (dir / "aggregate.csv").string() << " and "
              << (dir / "stats.json").string() << "\n";
  }
  if (out.verified.has_value() && !*out.verified) {
    std::cerr << "verification FAILED: aggregate differs from the oracle\n";
    return 1;
  }
  return 0;
}

int cmd_model(CliState& st, const std::string& strategy_name,
              const std::string& tree_path) {
  finish_spec(st);
  mwjoin::Strategy strategy = mwjoin::parse_strategy(strategy_name);
  json j;
  if (strategy == mwjoin::Strategy::Cyclic3) {
    // No loop tree for the cyclic join; report the tuples-read cost summary.
    mwjoin::CostInputs in = mwjoin::cost_inputs(st.spec, strategy);
    j["strategy"] = strategy_name;
    j["tuples_read"] = mwjoin::cyclic_cost(in);
    j["optimal_H"] = mwjoin::optimal_H(in);
    j["min_tuples_read"] = mwjoin::cyclic_min_cost(in);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  mwjoin::ModelOutcome out = mwjoin::model_one(st.spec, strategy);
  j["strategy"] = strategy_name;
  j["plan"] = out.plan;
  j["estimate"] = out.estimate;
  j["modeled_tuples_read"] = mwjoin::modeled_tuples_read(out.tree);
  j["modeled_comparisons"] = mwjoin::modeled_comparisons(out.tree);
  std::cout << j.dump(2) << "\n";
  if (!tree_path.empty()) {
    std::ofstream f(tree_path);
    if (!f) throw std::runtime_error("cannot open for writing: " + tree_path);
    json jt = out.tree;
    f << jt.dump(2) << "\n";
    std::cout << "wrote " << tree_path << "\n";
  }
  return 0;
}

int cmd_sweep(CliState& st, const std::string& strategy_name,
              const std::string& axis_name, const std::string& values_csv,
              bool engine_counters) {
  finish_spec(st);
  mwjoin::Strategy strategy = mwjoin::parse_strategy(strategy_name);
  mwjoin::SweepAxis axis = mwjoin::parse_axis(axis_name);
  std::vector<double> values = parse_values(values_csv);
  auto rows = mwjoin::sweep(st.spec, strategy, axis, values, engine_counters);
  if (st.format == "json") {
    json j;
    j["strategy"] = strategy_name;
    j["axis"] = axis_name;
    j["rows"] = json::array();
    for (const auto& r : rows) {
      json row;
      row["value"] = r.value;
      row["estimate"] = r.estimate;
      if (r.engine) row["engine"] = *r.engine;
      j["rows"].push_back(row);
    }
    emit(st, j.dump(2) + "\n");
  } else {
    emit(st, mwjoin::sweep_csv(st.spec, strategy, axis, rows));
  }
  return 0;
}

int cmd_compare(CliState& st, const std::string& bandwidths_csv,
                const std::string& n_values_csv) {
  finish_spec(st);
  std::vector<double> bws = parse_values(bandwidths_csv);
  std::vector<uint64_t> ns;
  for (double v : parse_values(n_values_csv))
    ns.push_back(static_cast<uint64_t>(v));
  auto rows = mwjoin::compare(st.spec, bws, ns);
  if (st.format == "json") {
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back({{"N", r.n},
                   {"d", r.d},
                   {"dram_bw", r.dram_bw},
                   {"threeway_cycles", r.threeway_cycles},
                   {"cascaded_cycles", r.cascaded_cycles},
                   {"speedup", r.speedup},
                   {"spilled", r.spilled}});
    }
    emit(st, j.dump(2) + "\n");
  } else {
    emit(st, mwjoin::compare_csv(st.spec, rows));
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional simulator and analytical performance model for "
               "multiway hash joins on a spatial accelerator"};
  app.require_subcommand(1);

  CliState st;
  std::string strategy = "linear3", axis = "H_bkt", values, bandwidths,
              n_values, tree_path, r_csv, s_csv, t_csv;
  bool verify = false, engine_counters = false;

  CLI::App* gen = app.add_subcommand("gen", "generate relation CSV files");
  add_common_options(gen, st);

  CLI::App* run = app.add_subcommand("run", "run the functional engine");
  add_common_options(run, st);
  run->add_option("--strategy", strategy,
                  "linear3 | cyclic3 | star3 | cascaded | cascaded-star");
  run->add_flag("--verify", verify, "check the aggregate against the oracle");
  run->add_option("--r", r_csv, "read R from a CSV instead of generating");
  run->add_option("--s", s_csv, "read S from a CSV instead of generating");
  run->add_option("--t", t_csv, "read T from a CSV instead of generating");

  CLI::App* model = app.add_subcommand("model", "evaluate the runtime model");
  add_common_options(model, st);
  model->add_option("--strategy", strategy);
  model->add_option("--tree", tree_path, "write the loop tree as JSON");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep one axis");
  add_common_options(sweep, st);
  sweep->add_option("--strategy", strategy);
  sweep->add_option("--axis", axis, "H_bkt | g_bkt | dram_bw | N | d");
  sweep->add_option("--values", values, "comma-separated axis values");
  sweep->add_flag("--engine-counters", engine_counters,
                  "also run the functional engine per point");

  CLI::App* compare =
      app.add_subcommand("compare", "best-plan 3-way vs cascaded comparison");
  add_common_options(compare, st);
  compare->add_option("--bandwidths", bandwidths,
                      "comma-separated DRAM bandwidths");
  compare->add_option("--n-values", n_values, "comma-separated N values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(st);
    if (run->parsed())
      return cmd_run(st, strategy, verify, r_csv, s_csv, t_csv);
    if (model->parsed()) return cmd_model(st, strategy, tree_path);
    if (sweep->parsed())
      return cmd_sweep(st, strategy, axis, values, engine_counters);
    if (compare->parsed()) return cmd_compare(st, bandwidths, n_values);
  } catch (const mwjoin::PlanInfeasible& e) {
    std::cerr << "infeasible plan: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
