#include <doctest.h>

#include <set>

#include "coalesce/error.hpp"
#include "coalesce/reproduce.hpp"

using namespace coalesce;

TEST_CASE("reproduction filter and negative control") {
  ReproductionOptions only;
  only.only = "two-bundles";
  const auto rows = run_reproductions(only);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].id == "two-bundles");
  CHECK(rows[0].pass);

  ReproductionOptions corrupted;
  corrupted.only = "kset-lazy-cycle-3";
  corrupted.lazy_cycle3 = parse_matrix("1/2 1/2 0\n0 1/2 1/2\n0 1/2 1/2");
  const auto bad = run_reproductions(corrupted);
  REQUIRE(bad.size() == 1);
  CHECK_FALSE(bad[0].pass);

  ReproductionOptions unknown;
  unknown.only = "no-such-row";
  CHECK_THROWS_AS(run_reproductions(unknown), Error);

  const auto ids = reproduction_ids();
  CHECK(ids.size() == 12);
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
}

TEST_CASE("quick reproductions pass") {
  for (const char* id : {"two-classes-cycle-4", "uniform-exclusion", "permutation-coupling-cycle-3",
                         "three-state-blocks", "full-rank-doubly-stochastic"}) {
    ReproductionOptions o;
    o.only = id;
    const auto rows = run_reproductions(o);
    REQUIRE(rows.size() == 1);
    INFO(id << ": expected " << rows[0].expected << ", computed " << rows[0].computed);
    CHECK(rows[0].pass);
  }
}
