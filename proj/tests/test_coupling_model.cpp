#include <doctest.h>

#include "coalesce/block_structure.hpp"
#include "coalesce/coupling_io.hpp"
#include "coalesce/error.hpp"
#include "oracles.hpp"

using namespace coalesce;

namespace {

ExplicitCoupling cycle4_two_class() {
  return ExplicitCoupling({{MapFunction::parse("1234"), Rational(1, 4)},
                           {MapFunction::parse("2244"), Rational(1, 4)},
                           {MapFunction::parse("1331"), Rational(1, 4)},
                           {MapFunction::parse("2341"), Rational(1, 4)}});
}

bool throws_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

// Sum of weight * M_f over an expansion, compared with the induced matrix.
void check_expansion_resums(const GrandCoupling& mu) {
  const ExplicitCoupling ex = expand(mu);
  std::vector<std::pair<MapFunction, Rational>> terms;
  Rational total = 0;
  for (const auto& t : ex.terms()) {
    terms.emplace_back(t.function, t.weight);
    total += t.weight;
  }
  CHECK(total == 1);
  CHECK(oracle::weighted_sum(terms, mu.state_count()) == induced_matrix(mu).rows());
}

}  // namespace

TEST_CASE("MapFunction text forms") {
  const auto f = MapFunction::parse("3434");
  CHECK(f.size() == 4);
  CHECK(f(0) == 2);
  CHECK(f.to_string() == "3434");
  CHECK(MapFunction::parse("3,4,3,4") == f);
  CHECK(MapFunction::parse("10,1,2,3,4,5,6,7,8,9").to_string() == "10,1,2,3,4,5,6,7,8,9");
  CHECK(throws_kind(ErrorKind::MalformedInput, [] { MapFunction::parse("3535"); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [] { MapFunction::parse("1a"); }));
  CHECK(throws_kind(ErrorKind::DimensionMismatch, [] { MapFunction::parse("123", 4); }));
  CHECK(f.image_size() == 2);
  CHECK(MapFunction::identity(5).is_permutation());
  CHECK(MapFunction::constant(4, 2).is_constant());
}

TEST_CASE("Partition canonical form") {
  const auto p = Partition::parse("3,1|4,2", 4);
  CHECK(p.to_string() == "{1,3},{2,4}");
  CHECK(p == Partition::parse("2,4|1,3", 4));
  CHECK(p.block_of(3) == 1);
  CHECK(Partition::consecutive(6, 3).to_string() == "{1,2},{3,4},{5,6}");
  CHECK(throws_kind(ErrorKind::NotADivisor, [] { Partition::consecutive(6, 4); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [] { Partition::parse("1,2|2,3", 3); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [] { Partition::parse("1,2", 3); }));
  // Bell numbers
  CHECK(all_partitions(1).size() == 1);
  CHECK(all_partitions(4).size() == 15);
  CHECK(all_partitions(6).size() == 203);
}

TEST_CASE("ExplicitCoupling validation") {
  const auto f = MapFunction::parse("12");
  const auto g = MapFunction::parse("21");
  CHECK(throws_kind(ErrorKind::MalformedInput, [&] { ExplicitCoupling({{f, Rational(1, 2)}}); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [&] { ExplicitCoupling({{f, 1}, {g, 0}}); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [&] { ExplicitCoupling({{f, Rational(1, 2)}, {f, Rational(1, 2)}}); }));
  CHECK(throws_kind(ErrorKind::DimensionMismatch,
                    [&] { ExplicitCoupling({{f, Rational(1, 2)}, {MapFunction::parse("123"), Rational(1, 2)}}); }));
}

TEST_CASE("induced_matrix") {
  CHECK(induced_matrix(cycle4_two_class()) == StochasticMatrix::lazy_cycle(4));
  CHECK(induced_matrix(ExplicitCoupling::dirac(MapFunction::identity(3))) == StochasticMatrix::identity(3));
  const ExplicitCoupling perms({{MapFunction::parse("123"), Rational(1, 2)}, {MapFunction::parse("231"), Rational(1, 2)}});
  CHECK(induced_matrix(perms) == StochasticMatrix::lazy_cycle(3));
}

TEST_CASE("is_consistent") {
  CHECK(is_consistent(cycle4_two_class(), StochasticMatrix::lazy_cycle(4)));
  CHECK_FALSE(is_consistent(ExplicitCoupling::dirac(MapFunction::identity(2)), StochasticMatrix::uniform(2)));
  CHECK(throws_kind(ErrorKind::DimensionMismatch,
                    [] { is_consistent(ExplicitCoupling::dirac(MapFunction::identity(2)), StochasticMatrix::uniform(3)); }));
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 40; ++rep) {
    const auto p = oracle::random_stochastic(1 + rep % 5, gen);
    CHECK(is_consistent(doeblin_coupling(p), p));
    CHECK(is_consistent(doeblin_coupling(p, DoeblinMode::Lazy), p));
  }
}

TEST_CASE("doeblin_coupling") {
  const auto id = doeblin_coupling(StochasticMatrix::identity(2));
  CHECK(id == GrandCoupling(ExplicitCoupling::dirac(MapFunction::identity(2))));

  const auto p2 = doeblin_coupling(StochasticMatrix::uniform(2)).explicit_form();
  REQUIRE(p2.terms().size() == 4);
  for (const auto& t : p2.terms()) CHECK(t.weight == Rational(1, 4));

  const auto c3 = doeblin_coupling(StochasticMatrix::lazy_cycle(3)).explicit_form();
  REQUIRE(c3.terms().size() == 8);
  for (const auto& t : c3.terms()) CHECK(t.weight == Rational(1, 8));

  CHECK(throws_kind(ErrorKind::SupportTooLarge, [] { doeblin_coupling(StochasticMatrix::uniform(8), DoeblinMode::Explicit, 1000); }));
  const auto lazy = doeblin_coupling(StochasticMatrix::uniform(8), DoeblinMode::Lazy);
  CHECK(support_size(lazy, std::size_t{1} << 30) == 16'777'216);
  CHECK(support_size(lazy) > kDefaultSupportCap);
  CHECK(expand(doeblin_coupling(StochasticMatrix::lazy_cycle(3), DoeblinMode::Lazy)) == c3);
}

TEST_CASE("permutation_coupling") {
  const auto c3 = permutation_coupling(StochasticMatrix::lazy_cycle(3));
  CHECK(c3 == GrandCoupling(ExplicitCoupling(
                  {{MapFunction::parse("123"), Rational(1, 2)}, {MapFunction::parse("231"), Rational(1, 2)}})));
  CHECK(permutation_coupling(StochasticMatrix::identity(4)) ==
        GrandCoupling(ExplicitCoupling::dirac(MapFunction::identity(4))));
  CHECK(permutation_coupling(StochasticMatrix::uniform(2)) ==
        GrandCoupling(ExplicitCoupling({{MapFunction::parse("12"), Rational(1, 2)}, {MapFunction::parse("21"), Rational(1, 2)}})));
  CHECK(throws_kind(ErrorKind::NotDoublyStochastic, [] { permutation_coupling(parse_matrix("1/2 1/2\n1 0")); }));

  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = oracle::random_doubly_stochastic(1 + rep % 7, gen);
    const auto mu = permutation_coupling(d);
    CHECK(is_consistent(mu, d));
    for (const auto& t : mu.explicit_form().terms()) CHECK(t.function.is_permutation());
  }
}

TEST_CASE("expand_support") {
  CHECK(expand_support(cycle4_two_class()).size() == 4);
  const auto f = MapFunction::parse("311");
  CHECK(expand_support(ExplicitCoupling::dirac(f)) == Support({f}));
  CHECK(expand_support(uniform_divisor_coupling(4, 2)).size() == 32);
  CHECK(support_size(uniform_divisor_coupling(4, 2)) == 32);
  CHECK(support_size(uniform_divisor_coupling(12, 12), 1000) == 1001);
  CHECK(throws_kind(ErrorKind::SupportTooLarge, [] { expand(uniform_divisor_coupling(12, 12), 1000); }));
}

TEST_CASE("expansion re-sums to the induced matrix") {
  check_expansion_resums(uniform_divisor_coupling(4, 2));
  check_expansion_resums(uniform_divisor_coupling(6, 3));
  check_expansion_resums(uniform_divisor_coupling(3, 3));
  check_expansion_resums(doeblin_coupling(StochasticMatrix::lazy_cycle(4), DoeblinMode::Lazy));
  std::mt19937_64 gen(29);
  for (int rep = 0; rep < 30; ++rep) {
    const auto p = oracle::random_stochastic(2 + rep % 4, gen);
    check_expansion_resums(doeblin_coupling(p, DoeblinMode::Lazy));
  }
  // block measures built from lumpable chains
  const auto p = parse_matrix(
      "1/6 1/3 1/4 1/4\n"
      "1/3 1/6 0 1/2\n"
      "1/4 1/4 1/2 0\n"
      "1/4 1/4 1/3 1/6");
  const auto part = Partition::parse("1,2|3,4", 4);
  REQUIRE(check_block_conditions(p, part));
  const auto mu = construct_block_measure(p, part);
  CHECK(is_consistent(mu, p));
  check_expansion_resums(mu);
}

TEST_CASE("BlockCoupling rejects undefined conditionals") {
  const auto part = Partition::parse("1,2|3,4", 4);
  std::vector<std::vector<Rational>> within(4, std::vector<Rational>(4, 0));
  within[0][0] = within[1][1] = within[2][2] = within[3][3] = 1;
  // the swap sends block 1 to block 2, where states 1 and 2 have no mass
  CHECK_THROWS_AS(BlockCoupling(part, BlockPermutationLaw::uniform(2), within), Error);
  CHECK_NOTHROW(BlockCoupling(part, BlockPermutationLaw({{{0, 1}, 1}}), within));
}

TEST_CASE("coupling JSON round trip") {
  const std::vector<GrandCoupling> cases = {
      cycle4_two_class(),
      ExplicitCoupling::dirac(MapFunction::parse("1,1,1,1,1,1,1,1,1,10")),
      uniform_divisor_coupling(6, 2),
      doeblin_coupling(StochasticMatrix::lazy_cycle(5), DoeblinMode::Lazy),
      construct_block_measure(StochasticMatrix::uniform(4), Partition::parse("1,2|3,4", 4)),
  };
  for (const auto& mu : cases) {
    CHECK(parse_coupling(serialize_coupling(mu)) == mu);
    CHECK(coupling_from_json(to_json(mu)) == mu);
  }
}

TEST_CASE("coupling JSON input forms") {
  const auto mu = parse_coupling(R"({"n": 2, "functions": [{"map": "12", "weight": 1}]})");
  CHECK(mu == GrandCoupling(ExplicitCoupling::dirac(MapFunction::identity(2))));

  // blocks listed out of canonical order are relabeled consistently
  const auto a = parse_coupling(R"({"n": 4, "partition": [[3,4],[1,2]],
      "block_perms": [{"perm": [1,2], "weight": "1/3"}, {"perm": [2,1], "weight": "2/3"}],
      "within": [[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]]})");
  const auto b = parse_coupling(R"({"n": 4, "partition": [[1,2],[3,4]],
      "block_perms": [{"perm": [1,2], "weight": "1/3"}, {"perm": [2,1], "weight": "2/3"}],
      "within": [[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]]})");
  CHECK(a == b);
  CHECK(induced_matrix(a)(0, 2) == Rational(1, 3));

  CHECK(throws_kind(ErrorKind::MalformedInput, [] { parse_coupling("{"); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [] { parse_coupling(R"({"n": 2})"); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [] { parse_coupling(R"({"n": 2, "functions": [{"map": "12", "weight": "1/2"}]})"); }));
  CHECK(throws_kind(ErrorKind::MalformedRational, [] { parse_coupling(R"({"n": 2, "functions": [{"map": "12", "weight": "0.5"}]})"); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [] {
    parse_coupling(R"({"n": 2, "partition": [[1,2]], "block_perms": "random", "within": [[1,1],[1,1]]})");
  }));
}

TEST_CASE("function lists") {
  CHECK(parse_function_list("1234;2244").size() == 2);
  CHECK(parse_function_list("1234 2244 1234").size() == 2);
  CHECK(to_string(parse_function_list("2244;1234")) == "{1234 2244}");
  CHECK(throws_kind(ErrorKind::DimensionMismatch, [] { parse_function_list("123", 4); }));
  CHECK(throws_kind(ErrorKind::MalformedInput, [] { parse_function_list(""); }));
}
