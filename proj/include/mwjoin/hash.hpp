#pragma once

#include <array>
#include <cstdint>

#include "mwjoin/types.hpp"

namespace mwjoin {

// The five hash functions of the two-level bucketing scheme. H and G are the
// coarse (partition) levels, h and g map onto memory units, f is the fine
// C-column bucketing used by the cyclic join.
enum class HashFn : uint8_t { H = 0, G = 1, h = 2, g = 3, f = 4 };

inline constexpr std::size_t kHashFnCount = 5;

// Per-function odd multipliers (splitmix64 outputs of the function index,
// forced odd). Keeping them distinct decorrelates the levels.
inline constexpr std::array<uint64_t, kHashFnCount> kDefaultSalts = {
    0xe220a8397b1dcdafULL, // H
    0x910a2dec89025cc1ULL, // G
    0x975835de1c9756cfULL, // h
    0x1d0b14e4db018fedULL, // g
    0x6e73e372e2338acbULL, // f
};

// Multiplicative (Fibonacci-style) hashing: the 32-bit key is multiplied by
// the per-function odd salt, the halves of the 64-bit product are folded, and
// the result is reduced modulo the bucket count. Total and deterministic.
uint32_t hash_bucket(uint32_t value, uint64_t salt, uint32_t buckets);
uint32_t hash_bucket(uint32_t value, HashFn fn, uint32_t buckets);

// Bucket counts for every hash function level plus per-level salts.
struct HashPlan {
  uint32_t H_bkt = 1;
  uint32_t G_bkt = 1;
  uint32_t h_bkt = 64;
  uint32_t g_bkt = 1;
  uint32_t f_bkt = 1;
  std::array<uint64_t, kHashFnCount> salt_per_level = kDefaultSalts;

  uint32_t buckets(HashFn fn) const;
  uint64_t salt(HashFn fn) const {
    return salt_per_level[static_cast<std::size_t>(fn)];
  }
  // All bucket counts must be >= 1.
  void validate() const;
};

} // namespace mwjoin
