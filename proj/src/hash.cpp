#include "mwjoin/hash.hpp"

#include <stdexcept>

namespace mwjoin {

uint32_t hash_bucket(uint32_t value, uint64_t salt, uint32_t buckets) {
  if (buckets == 0) throw std::invalid_argument("bucket count must be >= 1");
  uint64_t x = static_cast<uint64_t>(value) * (salt | 1);
  x ^= x >> 32; // fold the well-mixed high half into the low half
  return static_cast<uint32_t>(x % buckets);
}

uint32_t hash_bucket(uint32_t value, HashFn fn, uint32_t buckets) {
  return hash_bucket(value, kDefaultSalts[static_cast<std::size_t>(fn)],
                     buckets);
}

uint32_t HashPlan::buckets(HashFn fn) const {
  switch (fn) {
    case HashFn::H: return H_bkt;
    case HashFn::G: return G_bkt;
    case HashFn::h: return h_bkt;
    case HashFn::g: return g_bkt;
    case HashFn::f: return f_bkt;
  }
  throw std::invalid_argument("unknown hash function");
}

void HashPlan::validate() const {
  if (H_bkt == 0 || G_bkt == 0 || h_bkt == 0 || g_bkt == 0 || f_bkt == 0)
    throw std::invalid_argument("all bucket counts must be >= 1");
}

} // namespace mwjoin
