#include <doctest.h>

#include "coalesce/error.hpp"
#include "coalesce/stochastic_matrix.hpp"
#include "oracles.hpp"

using namespace coalesce;

namespace {

const char* kCycle3 = "1/2 1/2 0\n0 1/2 1/2\n1/2 0 1/2";

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::MalformedInput;
}

}  // namespace

TEST_CASE("parse_rational") {
  CHECK(parse_rational("1/2") == Rational(1, 2));
  CHECK(parse_rational("2/4") == Rational(1, 2));
  CHECK(parse_rational("-3") == Rational(-3));
  CHECK(parse_rational("+0") == 0);
  CHECK(parse_rational("6/4").get_den() == 2);
  CHECK(kind_of([] { parse_rational("1/0"); }) == ErrorKind::MalformedRational);
  CHECK(kind_of([] { parse_rational("0.5"); }) == ErrorKind::MalformedRational);
  CHECK(kind_of([] { parse_rational("abc"); }) == ErrorKind::MalformedRational);
  CHECK(kind_of([] { parse_rational(""); }) == ErrorKind::MalformedRational);
  CHECK(to_string(ratio(3, 6)) == "1/2");
  CHECK_THROWS_AS(ratio(1, 0), Error);
  CHECK(to_string(Rational(2)) == "2");
}

TEST_CASE("parse_matrix") {
  const auto p = parse_matrix(kCycle3);
  CHECK(p == StochasticMatrix::lazy_cycle(3));
  CHECK(p(2, 0) == Rational(1, 2));

  CHECK(parse_matrix("1") == StochasticMatrix::identity(1));
  CHECK(parse_matrix("# comment\n\n1/2 1/2 # trailing\n1 0\n") ==
        StochasticMatrix({{Rational(1, 2), Rational(1, 2)}, {1, 0}}));

  try {
    parse_matrix("1/2 1/3\n1/2 1/2");
    FAIL("expected RowSumError");
  } catch (const RowSumError& e) {
    CHECK(e.kind() == ErrorKind::RowSumNotOne);
    CHECK(e.row() == 0);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  CHECK(kind_of([] { parse_matrix("1 0\n1"); }) == ErrorKind::NonSquare);
  CHECK(kind_of([] { parse_matrix("1 0 0\n0 1 0"); }) == ErrorKind::NonSquare);
  CHECK(kind_of([] { parse_matrix("3/2 -1/2\n0 1"); }) == ErrorKind::EntryOutOfRange);
  CHECK(kind_of([] { parse_matrix("1/2 x\n0 1"); }) == ErrorKind::MalformedRational);
  CHECK(kind_of([] { parse_matrix(""); }) == ErrorKind::NonSquare);
}

TEST_CASE("round trip through to_string") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = oracle::random_stochastic(1 + rep % 6, gen);
    CHECK(parse_matrix(p.to_string()) == p);
  }
}

TEST_CASE("irreducibility and period") {
  const auto c3 = parse_matrix(kCycle3);
  const auto swap = parse_matrix("0 1\n1 0");
  CHECK(is_irreducible(c3));
  CHECK_FALSE(is_irreducible(StochasticMatrix::identity(2)));
  CHECK(is_irreducible(StochasticMatrix::uniform(5)));
  CHECK(is_irreducible(StochasticMatrix::identity(1)));

  CHECK(period(swap) == 2);
  CHECK(period(c3) == 1);
  CHECK(period(StochasticMatrix::uniform(4)) == 1);
  CHECK(period(parse_matrix("0 1 0 0\n0 0 1 0\n0 0 0 1\n1 0 0 0")) == 4);
  CHECK(period(parse_matrix("0 1/2 0 1/2\n1/2 0 1/2 0\n0 1/2 0 1/2\n1/2 0 1/2 0")) == 2);
  // cycles of length 2 and 3 through state 1
  CHECK(period(parse_matrix("0 1/2 1/2\n1 0 0\n0 1 0")) == 1);
  CHECK(kind_of([] { period(StochasticMatrix::identity(2)); }) == ErrorKind::NotIrreducible);
  CHECK(is_aperiodic(c3));
  CHECK_FALSE(is_aperiodic(swap));
  CHECK_FALSE(is_aperiodic(StochasticMatrix::identity(2)));
}

TEST_CASE("period is invariant under relabeling") {
  std::mt19937_64 gen(5);
  int tested = 0;
  while (tested < 100) {
    const std::size_t n = 2 + gen() % 5;
    const auto p = oracle::random_stochastic(n, gen, 4, 0.7);
    if (!is_irreducible(p)) continue;
    ++tested;
    const auto q = p.relabeled(oracle::random_permutation(n, gen));
    REQUIRE(is_irreducible(q));
    CHECK(period(q) == period(p));
  }
}

TEST_CASE("double stochasticity") {
  CHECK(is_doubly_stochastic(parse_matrix(kCycle3)));
  CHECK(is_doubly_stochastic(StochasticMatrix::lazy_cycle(4)));
  CHECK_FALSE(is_doubly_stochastic(parse_matrix("1/2 1/2\n1 0")));
}

TEST_CASE("invariant distribution") {
  CHECK(invariant_distribution(parse_matrix(kCycle3)) == ProbabilityVector::uniform(3));
  CHECK(invariant_distribution(parse_matrix("0 1\n1/2 1/2")) ==
        ProbabilityVector({Rational(1, 3), Rational(2, 3)}));
  CHECK(invariant_distribution(StochasticMatrix::identity(1)) == ProbabilityVector::uniform(1));
  CHECK(kind_of([] { invariant_distribution(StochasticMatrix::identity(3)); }) == ErrorKind::NotIrreducible);

  std::mt19937_64 gen(7);
  int tested = 0;
  while (tested < 100) {
    const std::size_t n = 1 + gen() % 6;
    const auto p = tested % 2 ? oracle::random_doubly_stochastic(n, gen) : oracle::random_stochastic(n, gen);
    if (!is_irreducible(p)) continue;
    ++tested;
    const auto pi = invariant_distribution(p);
    Rational total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      Rational mass = 0;
      for (std::size_t i = 0; i < n; ++i) mass += pi[i] * p(i, j);
      CHECK(mass == pi[j]);
      CHECK(pi[j] > 0);
      total += pi[j];
    }
    CHECK(total == 1);
    CHECK(is_doubly_stochastic(p) == (pi == ProbabilityVector::uniform(n)));
  }
}

TEST_CASE("row sums of every constructed matrix are exactly one") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = oracle::random_stochastic(1 + rep % 7, gen, 30);
    for (std::size_t i = 0; i < p.size(); ++i) {
      Rational s = 0;
      for (const auto& x : p.row(i)) s += x;
      CHECK(s == 1);
    }
  }
}
