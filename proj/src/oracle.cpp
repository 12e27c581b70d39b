#include "mwjoin/oracle.hpp"

#include <stdexcept>

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

} // namespace

JoinAggregate oracle_linear3(const Relation& R, const Relation& S,
                             const Relation& T) {
  require_roles(R, Role::A, Role::B, "R");
  require_roles(S, Role::B, Role::C, "S");
  require_roles(T, Role::C, Role::D, "T");
  JoinAggregate agg;
  for (const Tuple& r : R.tuples)
    for (const Tuple& s : S.tuples) {
      if (r.k2 != s.k1) continue;
      for (const Tuple& t : T.tuples)
        if (s.k2 == t.k1) ++agg[r.k1];
    }
  return agg;
}

JoinAggregate oracle_cyclic3(const Relation& R, const Relation& S,
                             const Relation& T) {
  require_roles(R, Role::A, Role::B, "R");
  require_roles(S, Role::B, Role::C, "S");
  require_roles(T, Role::C, Role::A, "T");
  JoinAggregate agg;
  for (const Tuple& r : R.tuples)
    for (const Tuple& s : S.tuples) {
      if (r.k2 != s.k1) continue;
      for (const Tuple& t : T.tuples)
        if (s.k2 == t.k1 && t.k2 == r.k1) ++agg[r.k1];
    }
  return agg;
}

Relation3 oracle_binary(const Relation& X, const Relation& Y, Role joincol) {
  if (X.roles[1] != joincol || Y.roles[0] != joincol)
    throw std::invalid_argument(
        std::string("join column ") + role_letter(joincol) +
        " must be X's second and Y's first column");
  Relation3 out;
  out.name = X.name + "_" + Y.name;
  out.roles = {X.roles[0], joincol, Y.roles[1]};
  for (const Tuple& x : X.tuples)
    for (const Tuple& y : Y.tuples)
      if (x.k2 == y.k1) out.tuples.push_back({x.k1, x.k2, y.k2});
  return out;
}

JoinAggregate oracle_binary_count(const Relation3& I, const Relation& T,
                                  Role joincol) {
  if (I.roles[2] != joincol || T.roles[0] != joincol)
    throw std::invalid_argument(
        std::string("join column ") + role_letter(joincol) +
        " must be I's third and T's first column");
  JoinAggregate agg;
  for (const Tuple3& i : I.tuples)
    for (const Tuple& t : T.tuples)
      if (i.c == t.k1) ++agg[i.a];
  return agg;
}

} // namespace mwjoin
