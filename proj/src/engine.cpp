#include "mwjoin/engine.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mwjoin/datagen.hpp"

namespace mwjoin {

namespace {

void require_roles(const Relation& rel, Role first, Role second,
                   const char* which) {
  if (rel.roles[0] != first || rel.roles[1] != second)
    throw std::invalid_argument(std::string(which) + " has columns (" +
                                role_letter(rel.roles[0]) + "," +
                                role_letter(rel.roles[1]) + "), expected (" +
                                role_letter(first) + "," +
                                role_letter(second) + ")");
}

uint64_t ceil_div(uint64_t a, uint64_t b) { return b ? (a + b - 1) / b : 0; }

struct ChipBudget {
  uint64_t total;   // effective on-chip tuple capacity
  uint64_t per_pmu; // uniform split across the U units

  ChipBudget(const MachineConfig& cfg) {
    if (cfg.U == 0) throw std::invalid_argument("machine must have U >= 1");
    total = effective_M(cfg, kTupleBytes);
    per_pmu = total / cfg.U;
  }

  void check(uint64_t occupancy) const {
    if (occupancy > per_pmu)
      throw PlanInfeasible("per-unit occupancy " + std::to_string(occupancy) +
                           " exceeds the on-chip budget of " +
                           std::to_string(per_pmu) + " tuples per unit");
  }
};

uint64_t key_ab(uint32_t a, uint32_t b) {
  return (static_cast<uint64_t>(a) << 32) | b;
}

} // namespace

RunResult run_linear3(const Relation& R, const Relation& S, const Relation& T,
                      const HashPlan& plan, const MachineConfig& cfg) {
  require_roles(R, Role::A, Role::B, "R");
  require_roles(S, Role::B, Role::C, "S");
  require_roles(T, Role::C, Role::D, "T");
  plan.validate();
  if (plan.h_bkt != cfg.U)
    throw PlanInfeasible("linear join requires h_bkt == U (one bucket per PMU)");
  ChipBudget budget(cfg);
  if (plan.H_bkt < ceil_div(R.size(), budget.total) || (R.size() > 0 && budget.total == 0))
    throw PlanInfeasible("H_bkt too small: one R partition must fit on-chip");

  const uint32_t U = cfg.U;
  const uint64_t salt_H = plan.salt(HashFn::H);
  const uint64_t salt_h = plan.salt(HashFn::h);
  const uint64_t salt_g = plan.salt(HashFn::g);

  auto r_parts = partition(R, Role::B, plan.H_bkt, salt_H);
  auto s_cells = two_level_partition_S(S, plan);
  auto t_parts = partition(T, Role::C, plan.g_bkt, salt_g);

  // Per-bucket histograms of T's C values, shared across R partitions.
  std::vector<std::unordered_map<uint32_t, uint64_t>> t_hist(plan.g_bkt);
  for (uint32_t j = 0; j < plan.g_bkt; ++j)
    for (const Tuple& t : t_parts[j].tuples) ++t_hist[j][t.k1];

  JoinAggregate agg;
  RunStats st;
  std::vector<uint64_t> r_cnt(U), s_cnt(U), matched(U);
  std::vector<std::unordered_map<uint32_t, uint64_t>> st_by_b(U);

  for (uint32_t i = 0; i < plan.H_bkt; ++i) {
    const Relation& Ri = r_parts[i];
    std::fill(r_cnt.begin(), r_cnt.end(), 0);
    for (auto& m : st_by_b) m.clear();
    for (const Tuple& r : Ri.tuples) ++r_cnt[hash_bucket(r.k2, salt_h, U)];
    st.dram_tuples_read += Ri.size();
    st.onchip_broadcasts += Ri.size();
    for (uint32_t u = 0; u < U; ++u) budget.check(r_cnt[u]);

    for (uint32_t j = 0; j < plan.g_bkt; ++j) {
      const Relation& Sij = s_cells[i][j];
      st.dram_tuples_read += Sij.size();
      st.onchip_broadcasts += Sij.size();
      if (Sij.tuples.empty()) continue; // empty bucket: T_j is not read

      std::fill(s_cnt.begin(), s_cnt.end(), 0);
      std::fill(matched.begin(), matched.end(), 0);
      const auto& tj = t_hist[j];
      for (const Tuple& s : Sij.tuples) {
        uint32_t u = hash_bucket(s.k1, salt_h, U);
        ++s_cnt[u];
        ++st.probe_comparisons;
        auto it = tj.find(s.k2);
        if (it != tj.end()) {
          matched[u] += it->second;
          st_by_b[u][s.k1] += it->second;
        }
      }
      st.dram_tuples_read += t_parts[j].size();
      st.onchip_broadcasts += static_cast<uint64_t>(U) * t_parts[j].size();
      st.comparisons += Sij.size() * t_parts[j].size();
      for (uint32_t u = 0; u < U; ++u) {
        budget.check(r_cnt[u] + s_cnt[u]);
        st.comparisons += matched[u] * r_cnt[u];
      }
    }

    for (const Tuple& r : Ri.tuples) {
      uint32_t u = hash_bucket(r.k2, salt_h, U);
      ++st.probe_comparisons;
      auto it = st_by_b[u].find(r.k2);
      if (it != st_by_b[u].end()) agg[r.k1] += it->second;
    }
  }
  return {std::move(agg), st};
}

RunResult run_cyclic3(const Relation& R, const Relation& S, const Relation& T,
                      const HashPlan& plan, const MachineConfig& cfg) {
  require_roles(R, Role::A, Role::B, "R");
  require_roles(S, Role::B, Role::C, "S");
  require_roles(T, Role::C, Role::A, "T");
  plan.validate();
  const uint32_t side = static_cast<uint32_t>(std::lround(std::sqrt(cfg.U)));
  if (side * side != cfg.U)
    throw PlanInfeasible("cyclic join requires U to be a perfect square");
  if (plan.h_bkt != side || plan.g_bkt != side)
    throw PlanInfeasible("cyclic join requires h_bkt == g_bkt == sqrt(U)");
  ChipBudget budget(cfg);
  if (static_cast<uint64_t>(plan.H_bkt) * plan.G_bkt <
          ceil_div(R.size(), budget.total) ||
      (R.size() > 0 && budget.total == 0))
    throw PlanInfeasible("H_bkt*G_bkt too small: one R partition must fit on-chip");

  const uint64_t salt_H = plan.salt(HashFn::H);
  const uint64_t salt_G = plan.salt(HashFn::G);
  const uint64_t salt_h = plan.salt(HashFn::h);
  const uint64_t salt_g = plan.salt(HashFn::g);
  const uint64_t salt_f = plan.salt(HashFn::f);

  // R split on (H(a), G(b)); S on G(b) then f(c); T on H(a) then f(c).
  auto r_rows = partition(R, Role::A, plan.H_bkt, salt_H);
  std::vector<std::vector<Relation>> r_cells;
  r_cells.reserve(plan.H_bkt);
  for (const Relation& ri : r_rows)
    r_cells.push_back(partition(ri, Role::B, plan.G_bkt, salt_G));

  std::vector<std::vector<Relation>> s_fine, t_fine;
  for (Relation& sj : partition(S, Role::B, plan.G_bkt, salt_G))
    s_fine.push_back(partition(sj, Role::C, plan.f_bkt, salt_f));
  for (Relation& ti : partition(T, Role::A, plan.H_bkt, salt_H))
    t_fine.push_back(partition(ti, Role::C, plan.f_bkt, salt_f));

  JoinAggregate agg;
  RunStats st;
  std::vector<uint64_t> pmu_r(static_cast<size_t>(side) * side);
  std::vector<uint64_t> s_col(side);
  std::unordered_map<uint64_t, uint64_t> r_ab;
  std::unordered_map<uint32_t, std::vector<uint32_t>> s_by_c;

  for (uint32_t i = 0; i < plan.H_bkt; ++i) {
    for (uint32_t j = 0; j < plan.G_bkt; ++j) {
      const Relation& Rij = r_cells[i][j];
      std::fill(pmu_r.begin(), pmu_r.end(), 0);
      r_ab.clear();
      for (const Tuple& r : Rij.tuples) {
        uint32_t row = hash_bucket(r.k1, salt_h, side);
        uint32_t col = hash_bucket(r.k2, salt_g, side);
        ++pmu_r[static_cast<size_t>(row) * side + col];
        ++r_ab[key_ab(r.k1, r.k2)];
      }
      st.dram_tuples_read += Rij.size();
      st.onchip_broadcasts += Rij.size();
      for (uint64_t occ : pmu_r) budget.check(occ);

      for (uint32_t k = 0; k < plan.f_bkt; ++k) {
        const Relation& Sjk = s_fine[j][k];
        st.dram_tuples_read += Sjk.size();
        st.onchip_broadcasts += static_cast<uint64_t>(side) * Sjk.size();
        if (Sjk.tuples.empty()) continue; // skip the matching T bucket

        std::fill(s_col.begin(), s_col.end(), 0);
        s_by_c.clear();
        for (const Tuple& s : Sjk.tuples) {
          uint32_t col = hash_bucket(s.k1, salt_g, side);
          ++s_col[col];
          s_by_c[s.k2].push_back(s.k1);
        }
        for (uint32_t row = 0; row < side; ++row)
          for (uint32_t col = 0; col < side; ++col)
            budget.check(pmu_r[static_cast<size_t>(row) * side + col] +
                         s_col[col]);

        const Relation& Tik = t_fine[i][k];
        st.dram_tuples_read += Tik.size();
        st.onchip_broadcasts += static_cast<uint64_t>(side) * Tik.size();
        st.comparisons += Sjk.size() * Tik.size();
        for (const Tuple& t : Tik.tuples) {
          ++st.probe_comparisons;
          auto it = s_by_c.find(t.k1);
          if (it == s_by_c.end()) continue;
          uint32_t row = hash_bucket(t.k2, salt_h, side);
          for (uint32_t b : it->second) {
            uint32_t col = hash_bucket(b, salt_g, side);
            st.comparisons +=
                pmu_r[static_cast<size_t>(row) * side + col];
            ++st.probe_comparisons;
            auto rit = r_ab.find(key_ab(t.k2, b));
            if (rit != r_ab.end()) agg[t.k2] += rit->second;
          }
        }
      }
    }
  }
  return {std::move(agg), st};
}

RunResult run_star3(const Relation& R, const Relation& S, const Relation& T,
                    const HashPlan& plan, const MachineConfig& cfg) {
  require_roles(R, Role::A, Role::B, "R");
  require_roles(S, Role::B, Role::C, "S");
  require_roles(T, Role::C, Role::D, "T");
  plan.validate();
  if (static_cast<uint64_t>(plan.h_bkt) * plan.g_bkt != cfg.U)
    throw PlanInfeasible("star join requires h_bkt * g_bkt == U");
  ChipBudget budget(cfg);
  if (R.size() + T.size() > budget.total)
    throw PlanInfeasible("star join requires |R| + |T| <= on-chip capacity");

  const uint64_t salt_h = plan.salt(HashFn::h);
  const uint64_t salt_g = plan.salt(HashFn::g);

  JoinAggregate agg;
  RunStats st;

  // R is replicated across its h(b) row, T across its g(c) column, so the
  // streamed tuple s(b,c) meets both at the (h(b), g(c)) unit.
  std::vector<uint64_t> row_cnt(plan.h_bkt), col_cnt(plan.g_bkt);
  std::unordered_map<uint32_t, std::unordered_map<uint32_t, uint64_t>> r_groups;
  std::unordered_map<uint32_t, uint64_t> t_hist;
  for (const Tuple& r : R.tuples) {
    ++row_cnt[hash_bucket(r.k2, salt_h, plan.h_bkt)];
    ++r_groups[r.k2][r.k1];
  }
  st.dram_tuples_read += R.size();
  st.onchip_broadcasts += R.size() * static_cast<uint64_t>(plan.g_bkt);
  for (const Tuple& t : T.tuples) {
    ++col_cnt[hash_bucket(t.k1, salt_g, plan.g_bkt)];
    ++t_hist[t.k1];
  }
  st.dram_tuples_read += T.size();
  st.onchip_broadcasts += T.size() * static_cast<uint64_t>(plan.h_bkt);

  uint64_t max_row = 0, max_col = 0;
  for (uint64_t c : row_cnt) max_row = std::max(max_row, c);
  for (uint64_t c : col_cnt) max_col = std::max(max_col, c);
  budget.check(max_row + max_col);

  for (const Tuple& s : S.tuples) {
    ++st.dram_tuples_read;
    ++st.onchip_broadcasts;
    uint32_t row = hash_bucket(s.k1, salt_h, plan.h_bkt);
    uint32_t col = hash_bucket(s.k2, salt_g, plan.g_bkt);
    st.comparisons += row_cnt[row];
    st.probe_comparisons += 2;
    auto rit = r_groups.find(s.k1);
    if (rit == r_groups.end()) continue;
    auto tit = t_hist.find(s.k2);
    uint64_t t_matches = (tit == t_hist.end()) ? 0 : tit->second;
    uint64_t r_matches = 0;
    for (const auto& [a, cnt] : rit->second) {
      r_matches += cnt;
      if (t_matches > 0) agg[a] += cnt * t_matches;
    }
    st.comparisons += r_matches * col_cnt[col];
  }
  return {std::move(agg), st};
}

RunResult run_cascaded_binary(const Relation& R, const Relation& S,
                              const Relation& T, const HashPlan& plan,
                              const MachineConfig& cfg, bool star) {
  require_roles(R, Role::A, Role::B, "R");
  require_roles(S, Role::B, Role::C, "S");
  require_roles(T, Role::C, Role::D, "T");
  plan.validate();
  if (plan.h_bkt != cfg.U)
    throw PlanInfeasible("cascaded join fixes second-level buckets to U");
  ChipBudget budget(cfg);
  // The star variant loads R (then T) wholly on-chip in a single partition.
  const uint32_t H = star ? 1 : plan.H_bkt;
  const uint32_t G = star ? 1 : plan.G_bkt;
  if (H < ceil_div(R.size(), budget.total) ||
      (R.size() > 0 && budget.total == 0))
    throw PlanInfeasible("H_bkt too small: one R partition must fit on-chip");
  if (G < ceil_div(T.size(), budget.total) ||
      (T.size() > 0 && budget.total == 0))
    throw PlanInfeasible("G_bkt too small: one T partition must fit on-chip");

  const uint32_t U = cfg.U;
  const uint64_t salt_H = plan.salt(HashFn::H);
  const uint64_t salt_G = plan.salt(HashFn::G);
  const uint64_t salt_h = plan.salt(HashFn::h);
  const uint64_t salt_g = plan.salt(HashFn::g);

  RunStats st;

  // First join: R(A,B) x S(B,C), I(A,B,C) materialized to DRAM.
  Relation3 I;
  I.roles = {Role::A, Role::B, Role::C};
  auto r_parts = partition(R, Role::B, H, salt_H);
  auto s_parts = partition(S, Role::B, H, salt_H);
  std::vector<uint64_t> r_cnt(U);
  std::unordered_map<uint32_t, std::vector<uint32_t>> r_by_b;
  for (uint32_t i = 0; i < H; ++i) {
    std::fill(r_cnt.begin(), r_cnt.end(), 0);
    r_by_b.clear();
    for (const Tuple& r : r_parts[i].tuples) {
      ++r_cnt[hash_bucket(r.k2, salt_h, U)];
      r_by_b[r.k2].push_back(r.k1);
    }
    st.dram_tuples_read += r_parts[i].size();
    st.onchip_broadcasts += r_parts[i].size();
    for (uint32_t u = 0; u < U; ++u) budget.check(r_cnt[u]);

    for (const Tuple& s : s_parts[i].tuples) {
      ++st.dram_tuples_read;
      ++st.onchip_broadcasts;
      uint32_t u = hash_bucket(s.k1, salt_h, U);
      st.comparisons += r_cnt[u];
      ++st.probe_comparisons;
      auto it = r_by_b.find(s.k1);
      if (it == r_by_b.end()) continue;
      for (uint32_t a : it->second) I.tuples.push_back({a, s.k1, s.k2});
    }
  }
  st.intermediate_tuples = I.size();
  st.spilled =
      I.size() * static_cast<uint64_t>(kIntermediateTupleBytes) >
      cfg.dram_capacity_bytes;

  // Second join: I(A,B,C) x T(C,D); T partitions are loaded, I streams, and
  // the output is aggregated on the fly instead of being materialized.
  JoinAggregate agg;
  auto t_parts = partition(T, Role::C, G, salt_G);
  std::vector<std::vector<Tuple3>> i_parts(G);
  for (const Tuple3& t3 : I.tuples)
    i_parts[hash_bucket(t3.c, salt_G, G)].push_back(t3);

  std::vector<uint64_t> t_cnt(U);
  std::unordered_map<uint32_t, uint64_t> t_hist;
  for (uint32_t j = 0; j < G; ++j) {
    std::fill(t_cnt.begin(), t_cnt.end(), 0);
    t_hist.clear();
    for (const Tuple& t : t_parts[j].tuples) {
      ++t_cnt[hash_bucket(t.k1, salt_g, U)];
      ++t_hist[t.k1];
    }
    st.dram_tuples_read += t_parts[j].size();
    st.onchip_broadcasts += t_parts[j].size();
    for (uint32_t u = 0; u < U; ++u) budget.check(t_cnt[u]);

    for (const Tuple3& t3 : i_parts[j]) {
      ++st.dram_tuples_read;
      ++st.onchip_broadcasts;
      st.comparisons += t_cnt[hash_bucket(t3.c, salt_g, U)];
      ++st.probe_comparisons;
      auto it = t_hist.find(t3.c);
      if (it != t_hist.end()) agg[t3.a] += it->second;
    }
  }
  return {std::move(agg), st};
}

} // namespace mwjoin
