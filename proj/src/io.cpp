#include "mwjoin/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mwjoin {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

} // namespace

void write_relation_csv(const Relation& rel, std::ostream& out) {
  out << role_letter(rel.roles[0]) << ',' << role_letter(rel.roles[1]) << '\n';
  for (const Tuple& t : rel.tuples) out << t.k1 << ',' << t.k2 << '\n';
}

void write_relation_csv(const Relation& rel, const std::string& path) {
  auto out = open_out(path);
  write_relation_csv(rel, out);
}

Relation read_relation_csv(std::istream& in, std::string name) {
  Relation rel;
  rel.name = std::move(name);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("relation CSV is missing its header");
  std::size_t comma = line.find(',');
  if (comma == std::string::npos || comma + 1 >= line.size())
    throw std::runtime_error("malformed relation CSV header: " + line);
  // Tolerate a trailing \r from CRLF files.
  std::string second = line.substr(comma + 1);
  if (!second.empty() && second.back() == '\r') second.pop_back();
  rel.roles = {parse_role(line[0]), parse_role(second[0])};

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    uint64_t a = 0, b = 0;
    char sep = 0;
    std::istringstream row(line);
    if (!(row >> a >> sep >> b) || sep != ',' || a > 0xffffffffull ||
        b > 0xffffffffull)
      throw std::runtime_error("malformed relation CSV row " +
                               std::to_string(lineno) + ": " + line);
    rel.tuples.push_back(
        {static_cast<uint32_t>(a), static_cast<uint32_t>(b)});
  }
  return rel;
}

Relation read_relation_csv(const std::string& path) {
  auto in = open_in(path);
  return read_relation_csv(in, path);
}

void write_aggregate_csv(const JoinAggregate& agg, std::ostream& out) {
  out << "a_value,count\n";
  for (const auto& [a, count] : agg) out << a << ',' << count << '\n';
}

void write_aggregate_csv(const JoinAggregate& agg, const std::string& path) {
  auto out = open_out(path);
  write_aggregate_csv(agg, out);
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for checksum: " + path);
  uint64_t h = 0xcbf29ce484222325ull; // FNV-1a
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

// ---------------------------------------------------------------------------
// JSON bindings
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const DataProfile& p) {
  j = {{"n", p.n}, {"d", p.d}, {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, DataProfile& p) {
  j.at("n").get_to(p.n);
  j.at("d").get_to(p.d);
  j.at("seed").get_to(p.seed);
}

void to_json(nlohmann::json& j, const HashPlan& p) {
  j = {{"H_bkt", p.H_bkt}, {"G_bkt", p.G_bkt}, {"h_bkt", p.h_bkt},
       {"g_bkt", p.g_bkt}, {"f_bkt", p.f_bkt},
       {"salt_per_level", p.salt_per_level}};
}

void from_json(const nlohmann::json& j, HashPlan& p) {
  j.at("H_bkt").get_to(p.H_bkt);
  j.at("G_bkt").get_to(p.G_bkt);
  j.at("h_bkt").get_to(p.h_bkt);
  j.at("g_bkt").get_to(p.g_bkt);
  j.at("f_bkt").get_to(p.f_bkt);
  if (j.contains("salt_per_level")) j.at("salt_per_level").get_to(p.salt_per_level);
}

void to_json(nlohmann::json& j, const MachineConfig& c) {
  j = {{"U", c.U},
       {"L", c.L},
       {"onchip_bytes", c.onchip_bytes},
       {"dram_bw", c.dram_bw},
       {"ssd_bw", c.ssd_bw},
       {"dram_capacity_bytes", c.dram_capacity_bytes},
       {"net_latency_cycles", c.net_latency_cycles},
       {"pcu_latency_cycles", c.pcu_latency_cycles},
       {"clock_hz", c.clock_hz},
       {"double_buffered", c.double_buffered},
       {"dram_response_ns", c.dram_response_ns},
       {"dram_granule_bytes", c.dram_granule_bytes},
       {"peak_tflops", c.peak_tflops}};
}

void from_json(const nlohmann::json& j, MachineConfig& c) {
  MachineConfig def;
  c.U = j.value("U", def.U);
  c.L = j.value("L", def.L);
  c.onchip_bytes = j.value("onchip_bytes", def.onchip_bytes);
  c.dram_bw = j.value("dram_bw", def.dram_bw);
  c.ssd_bw = j.value("ssd_bw", def.ssd_bw);
  c.dram_capacity_bytes = j.value("dram_capacity_bytes", def.dram_capacity_bytes);
  c.net_latency_cycles = j.value("net_latency_cycles", def.net_latency_cycles);
  c.pcu_latency_cycles = j.value("pcu_latency_cycles", def.pcu_latency_cycles);
  c.clock_hz = j.value("clock_hz", def.clock_hz);
  c.double_buffered = j.value("double_buffered", def.double_buffered);
  c.dram_response_ns = j.value("dram_response_ns", def.dram_response_ns);
  c.dram_granule_bytes = j.value("dram_granule_bytes", def.dram_granule_bytes);
  c.peak_tflops = j.value("peak_tflops", def.peak_tflops);
}

void to_json(nlohmann::json& j, const RunStats& s) {
  j = {{"dram_tuples_read", s.dram_tuples_read},
       {"onchip_broadcasts", s.onchip_broadcasts},
       {"comparisons", s.comparisons},
       {"probe_comparisons", s.probe_comparisons},
       {"intermediate_tuples", s.intermediate_tuples},
       {"spilled", s.spilled}};
}

void from_json(const nlohmann::json& j, RunStats& s) {
  j.at("dram_tuples_read").get_to(s.dram_tuples_read);
  j.at("onchip_broadcasts").get_to(s.onchip_broadcasts);
  j.at("comparisons").get_to(s.comparisons);
  j.at("probe_comparisons").get_to(s.probe_comparisons);
  j.at("intermediate_tuples").get_to(s.intermediate_tuples);
  j.at("spilled").get_to(s.spilled);
}

void to_json(nlohmann::json& j, const RuntimeEstimate& e) {
  j = {{"cycles", e.cycles},
       {"seconds", e.seconds},
       {"bottleneck", e.bottleneck},
       {"breakdown",
        {{"partition", e.partition_cycles},
         {"join1", e.join1_cycles},
         {"join2", e.join2_cycles}}}};
}

namespace {

const char* construct_name(Construct c) {
  switch (c) {
    case Construct::Sequential: return "sequential";
    case Construct::Parallel: return "parallel";
    case Construct::Pipeline: return "pipeline";
    case Construct::Streaming: return "streaming";
  }
  return "?";
}

const char* leaf_name(LeafKind k) {
  switch (k) {
    case LeafKind::None: return "none";
    case LeafKind::Compute: return "compute";
    case LeafKind::FixedCycles: return "fixed_cycles";
    case LeafKind::DramRead: return "dram_read";
    case LeafKind::DramWrite: return "dram_write";
  }
  return "?";
}

} // namespace

void to_json(nlohmann::json& j, const LoopNode& n) {
  j = {{"label", n.label},
       {"trips", n.trips},
       {"construct", construct_name(n.construct)}};
  if (n.construct == Construct::Parallel) j["parallel_by"] = n.parallel_by;
  if (n.branch_prob != 1.0) j["branch_prob"] = n.branch_prob;
  if (n.leaf != LeafKind::None) {
    j["leaf"] = leaf_name(n.leaf);
    if (n.leaf == LeafKind::Compute) {
      j["ops"] = n.ops;
      j["is_comparison"] = n.is_comparison;
    } else if (n.leaf == LeafKind::FixedCycles) {
      j["cycles"] = n.cycles;
    } else {
      j["bytes"] = n.bytes;
      j["requests"] = n.requests;
      j["tuples"] = n.tuples;
      j["use_ssd"] = n.use_ssd;
    }
  }
  if (!n.children.empty()) j["body"] = n.children;
}

} // namespace mwjoin
