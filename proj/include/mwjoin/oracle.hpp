#pragma once

#include "mwjoin/types.hpp"

namespace mwjoin {

// Brute-force reference joins. All of them are straightforward nested loops,
// intended for desk-scale inputs only; the engine is validated against them.

// R(A,B) joins S(B,C) joins T(C,D); counts matching (r,s,t) triples grouped
// by r.a. Throws std::invalid_argument on role mismatch.
JoinAggregate oracle_linear3(const Relation& R, const Relation& S,
                             const Relation& T);

// R(A,B) joins S(B,C) joins T(C,A); triangle counting grouped by r.a.
JoinAggregate oracle_cyclic3(const Relation& R, const Relation& S,
                             const Relation& T);

// Binary join of X and Y on the shared column `joincol`, which must be X's
// second and Y's first column (chain orientation). Returns the materialized
// three-column intermediate.
Relation3 oracle_binary(const Relation& X, const Relation& Y, Role joincol);

// Joins the intermediate I(ABC) with T(C,D) on `joincol` and counts results
// grouped by I's first column. Composing oracle_binary with this reproduces
// oracle_linear3.
JoinAggregate oracle_binary_count(const Relation3& I, const Relation& T,
                                  Role joincol);

} // namespace mwjoin
