#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mwjoin/datagen.hpp"
#include "mwjoin/io.hpp"

using namespace mwjoin;

namespace {

std::vector<Tuple> sorted_tuples(const Relation& rel) {
  auto v = rel.tuples;
  std::sort(v.begin(), v.end(), [](const Tuple& a, const Tuple& b) {
    return std::tie(a.k1, a.k2) < std::tie(b.k1, b.k2);
  });
  return v;
}

} // namespace

TEST_CASE("generate_relation basics") {
  CHECK(generate_relation({0, 5, 1}, {Role::A, Role::B}).size() == 0);

  Relation ones = generate_relation({1000, 1, 7}, {Role::A, Role::B});
  REQUIRE(ones.size() == 1000);
  for (const Tuple& t : ones.tuples) {
    CHECK(t.k1 == 0);
    CHECK(t.k2 == 0);
  }

  CHECK_THROWS_AS(generate_relation({10, 0, 1}, {Role::A, Role::B}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_relation({10, (1ull << 32) + 1, 1}, {Role::A, Role::B}),
                  std::invalid_argument);
}

TEST_CASE("generate_relation is deterministic") {
  DataProfile p{5000, 97, 42};
  Relation a = generate_relation(p, {Role::B, Role::C}, "S");
  Relation b = generate_relation(p, {Role::B, Role::C}, "S");
  CHECK(a.tuples == b.tuples);
  for (const Tuple& t : a.tuples) {
    CHECK(t.k1 < 97);
    CHECK(t.k2 < 97);
  }
}

TEST_CASE("generated frequencies follow the binomial model") {
  // n draws per column at p = 1/d: every value count stays within 5 sigma.
  DataProfile p{100000, 100, 3};
  Relation rel = generate_relation(p, {Role::A, Role::B});
  double mean = 100000.0 / 100.0;
  double sigma = std::sqrt(100000.0 * (1.0 / 100) * (1.0 - 1.0 / 100));
  std::map<uint32_t, uint64_t> c1, c2;
  for (const Tuple& t : rel.tuples) {
    ++c1[t.k1];
    ++c2[t.k2];
  }
  REQUIRE(c1.size() == 100);
  REQUIRE(c2.size() == 100);
  for (const auto& counts : {c1, c2})
    for (const auto& [v, n] : counts)
      CHECK(std::abs(static_cast<double>(n) - mean) <= 5.0 * sigma);
}

TEST_CASE("hash_bucket basics") {
  CHECK(hash_bucket(42, HashFn::H, 1) == 0);
  CHECK(hash_bucket(42, HashFn::H, 16) == hash_bucket(42, HashFn::H, 16));
  CHECK(hash_bucket(42, HashFn::H, 16) < 16);
  CHECK_THROWS_AS(hash_bucket(42, HashFn::H, 0), std::invalid_argument);
}

TEST_CASE("hash_bucket balances a uniform key domain") {
  std::vector<uint64_t> load(64, 0);
  for (uint32_t v = 0; v < 1000000; ++v) ++load[hash_bucket(v, HashFn::H, 64)];
  uint64_t lo = *std::min_element(load.begin(), load.end());
  uint64_t hi = *std::max_element(load.begin(), load.end());
  CHECK(static_cast<double>(hi) / static_cast<double>(lo) < 1.1);
}

TEST_CASE("hash levels are decorrelated") {
  // The same keys hashed at two levels should cover the product space.
  std::map<std::pair<uint32_t, uint32_t>, int> cells;
  for (uint32_t v = 0; v < 4096; ++v)
    ++cells[{hash_bucket(v, HashFn::H, 8), hash_bucket(v, HashFn::h, 8)}];
  CHECK(cells.size() == 64);
}

TEST_CASE("partition splits losslessly and by hash value") {
  Relation rel = generate_relation({1000, 100, 11}, {Role::A, Role::B});

  SUBCASE("empty input") {
    Relation empty;
    empty.roles = {Role::A, Role::B};
    auto parts = partition(empty, Role::B, HashFn::H, 4);
    REQUIRE(parts.size() == 4);
    for (const auto& p : parts) CHECK(p.size() == 0);
  }

  SUBCASE("single bucket is the identity") {
    auto parts = partition(rel, Role::B, HashFn::H, 1);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].tuples == rel.tuples);
  }

  SUBCASE("tuples land in the bucket of their hashed column") {
    auto parts = partition(rel, Role::B, HashFn::H, 8);
    uint64_t total = 0;
    for (uint32_t b = 0; b < 8; ++b) {
      total += parts[b].size();
      for (const Tuple& t : parts[b].tuples)
        CHECK(hash_bucket(t.k2, HashFn::H, 8) == b);
    }
    CHECK(total == rel.size());

    // The concatenation is a permutation of the input multiset.
    Relation merged;
    merged.roles = rel.roles;
    for (const auto& p : parts)
      merged.tuples.insert(merged.tuples.end(), p.tuples.begin(),
                           p.tuples.end());
    CHECK(sorted_tuples(merged) == sorted_tuples(rel));
  }

  SUBCASE("unknown column role") {
    CHECK_THROWS_AS(partition(rel, Role::C, HashFn::H, 4),
                    std::invalid_argument);
  }
}

TEST_CASE("two_level_partition_S orders cells i-major and re-hashes exactly") {
  Relation S = generate_relation({5000, 50, 13}, {Role::B, Role::C}, "S");

  SUBCASE("1x1 plan is a single cell equal to S") {
    HashPlan plan;
    plan.H_bkt = 1;
    plan.g_bkt = 1;
    auto cells = two_level_partition_S(S, plan);
    REQUIRE(cells.size() == 1);
    REQUIRE(cells[0].size() == 1);
    CHECK(cells[0][0].tuples == S.tuples);
  }

  SUBCASE("every tuple is in exactly the cell its hashes name") {
    HashPlan plan;
    plan.H_bkt = 4;
    plan.g_bkt = 8;
    auto cells = two_level_partition_S(S, plan);
    REQUIRE(cells.size() == 4);
    uint64_t total = 0;
    for (uint32_t i = 0; i < 4; ++i) {
      REQUIRE(cells[i].size() == 8);
      for (uint32_t j = 0; j < 8; ++j) {
        total += cells[i][j].size();
        for (const Tuple& t : cells[i][j].tuples) {
          CHECK(hash_bucket(t.k1, plan.salt(HashFn::H), 4) == i);
          CHECK(hash_bucket(t.k2, plan.salt(HashFn::g), 8) == j);
        }
      }
    }
    CHECK(total == S.size());
  }
}

TEST_CASE("relation CSV round trip") {
  Relation rel = generate_relation({257, 1000, 99}, {Role::C, Role::D}, "T");
  std::ostringstream out;
  write_relation_csv(rel, out);
  std::istringstream in(out.str());
  Relation back = read_relation_csv(in, "T");
  CHECK(back.roles == rel.roles);
  CHECK(back.tuples == rel.tuples);

  std::istringstream bad("A;B\n1,2\n");
  CHECK_THROWS(read_relation_csv(bad));
}

TEST_CASE("aggregate CSV format") {
  JoinAggregate agg{{3, 7}, {1, 2}};
  std::ostringstream out;
  write_aggregate_csv(agg, out);
  CHECK(out.str() == "a_value,count\n1,2\n3,7\n");
}

TEST_CASE("profile and plan JSON round trips") {
  DataProfile p{123, 45, 6};
  nlohmann::json jp = p;
  CHECK(jp.at("n") == 123);
  DataProfile p2 = jp.get<DataProfile>();
  CHECK(p2 == p);

  HashPlan plan;
  plan.H_bkt = 3;
  plan.g_bkt = 17;
  nlohmann::json jplan = plan;
  HashPlan plan2 = jplan.get<HashPlan>();
  CHECK(plan2.H_bkt == 3);
  CHECK(plan2.g_bkt == 17);
  CHECK(plan2.salt_per_level == plan.salt_per_level);

  CHECK_THROWS_AS([] {
    HashPlan bad;
    bad.f_bkt = 0;
    bad.validate();
  }(), std::invalid_argument);
}
