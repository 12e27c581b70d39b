#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mwjoin/hash.hpp"
#include "mwjoin/types.hpp"

namespace mwjoin {

// Shape of a synthetic relation: n tuples, both columns drawn uniformly from
// {0, ..., d-1} by a seeded generator.
struct DataProfile {
  uint64_t n = 0;
  uint64_t d = 1; // distinct values per join column
  uint64_t seed = 0;

  friend bool operator==(const DataProfile&, const DataProfile&) = default;
};

// Deterministic generation: column values are successive mt19937_64 outputs
// reduced modulo d. Identical (profile, roles) inputs give identical
// relations on every platform. Throws std::invalid_argument for d = 0 or
// d > 2^32.
Relation generate_relation(const DataProfile& profile,
                           std::array<Role, 2> roles,
                           std::string name = "R");

// Splits rel into `buckets` relations by hashing the given column. The
// concatenation of the outputs is a permutation of the input multiset.
std::vector<Relation> partition(const Relation& rel, Role column, HashFn fn,
                                uint32_t buckets);
std::vector<Relation> partition(const Relation& rel, Role column,
                                uint32_t buckets, uint64_t salt);

// Two-level partitioning of S(B,C): result[i][j] holds the tuples with
// H(b) = i and g(c) = j, i-major.
std::vector<std::vector<Relation>> two_level_partition_S(const Relation& S,
                                                         const HashPlan& plan);

} // namespace mwjoin
