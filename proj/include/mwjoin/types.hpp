#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwjoin {

// Fixed tuple widths used for all byte-volume computations.
inline constexpr uint32_t kTupleBytes = 8;              // two 4-byte key columns
inline constexpr uint32_t kIntermediateTupleBytes = 12; // three 4-byte columns

enum class Role : uint8_t { A = 0, B, C, D };

char role_letter(Role r);
Role parse_role(char c); // throws std::invalid_argument on unknown letter

struct Tuple {
  uint32_t k1 = 0;
  uint32_t k2 = 0;
  friend bool operator==(const Tuple&, const Tuple&) = default;
};

struct Tuple3 {
  uint32_t a = 0;
  uint32_t b = 0;
  uint32_t c = 0;
  friend bool operator==(const Tuple3&, const Tuple3&) = default;
};

// A multiset of fixed-width two-column tuples. Duplicates are kept.
struct Relation {
  std::string name;
  std::array<Role, 2> roles{Role::A, Role::B};
  std::vector<Tuple> tuples;

  uint64_t size() const { return tuples.size(); }
  bool has_role(Role r) const { return roles[0] == r || roles[1] == r; }
  // Index of the column carrying `r`; throws std::invalid_argument if absent.
  int role_index(Role r) const;
  uint32_t value(const Tuple& t, Role r) const {
    return role_index(r) == 0 ? t.k1 : t.k2;
  }
};

// Materialized intermediate of a binary join, three columns.
struct Relation3 {
  std::string name;
  std::array<Role, 3> roles{Role::A, Role::B, Role::C};
  std::vector<Tuple3> tuples;
  uint64_t size() const { return tuples.size(); }
};

// Group key (an A value) -> count of joined result tuples. Ordered so
// serialization and equality are deterministic.
using JoinAggregate = std::map<uint32_t, uint64_t>;

// Thrown when a hash plan violates an algorithm precondition or the data
// does not fit the simulated on-chip budget.
class PlanInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

} // namespace mwjoin
