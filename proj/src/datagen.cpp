#include "mwjoin/datagen.hpp"

#include <random>
#include <stdexcept>

namespace mwjoin {

Relation generate_relation(const DataProfile& profile,
                           std::array<Role, 2> roles, std::string name) {
  if (profile.d == 0) throw std::invalid_argument("d must be >= 1");
  if (profile.d > (1ull << 32))
    throw std::invalid_argument("d exceeds the 32-bit column domain");

  Relation rel;
  rel.name = std::move(name);
  rel.roles = roles;
  rel.tuples.reserve(profile.n);
  std::mt19937_64 gen(profile.seed);
  for (uint64_t i = 0; i < profile.n; ++i) {
    // mt19937_64 output reduced modulo d; the stream is pinned by the
    // standard, so results are identical across platforms.
    uint32_t k1 = static_cast<uint32_t>(gen() % profile.d);
    uint32_t k2 = static_cast<uint32_t>(gen() % profile.d);
    rel.tuples.push_back({k1, k2});
  }
  return rel;
}

std::vector<Relation> partition(const Relation& rel, Role column,
                                uint32_t buckets, uint64_t salt) {
  if (buckets == 0) throw std::invalid_argument("bucket count must be >= 1");
  const int col = rel.role_index(column);
  std::vector<Relation> parts(buckets);
  for (uint32_t b = 0; b < buckets; ++b) {
    parts[b].name = rel.name + "_" + std::to_string(b);
    parts[b].roles = rel.roles;
  }
  for (const Tuple& t : rel.tuples) {
    uint32_t v = (col == 0) ? t.k1 : t.k2;
    parts[hash_bucket(v, salt, buckets)].tuples.push_back(t);
  }
  return parts;
}

std::vector<Relation> partition(const Relation& rel, Role column, HashFn fn,
                                uint32_t buckets) {
  return partition(rel, column, buckets,
                   kDefaultSalts[static_cast<std::size_t>(fn)]);
}

std::vector<std::vector<Relation>> two_level_partition_S(const Relation& S,
                                                         const HashPlan& plan) {
  plan.validate();
  std::vector<std::vector<Relation>> cells;
  cells.reserve(plan.H_bkt);
  for (Relation& si :
       partition(S, Role::B, plan.H_bkt, plan.salt(HashFn::H))) {
    cells.push_back(
        partition(si, Role::C, plan.g_bkt, plan.salt(HashFn::g)));
  }
  return cells;
}

} // namespace mwjoin
