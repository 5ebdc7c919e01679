#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <sstream>

#include "coalesce/block_structure.hpp"
#include "coalesce/cftp.hpp"
#include "coalesce/coupling_io.hpp"
#include "coalesce/diagram.hpp"
#include "coalesce/error.hpp"
#include "coalesce/rng.hpp"
#include "coalesce/semigroup.hpp"
#include "oracles.hpp"

using namespace coalesce;

namespace {

GrandCoupling two_bundles() {
  return ExplicitCoupling({{MapFunction::parse("3434"), Rational(1, 4)},
                           {MapFunction::parse("4334"), Rational(1, 4)},
                           {MapFunction::parse("3412"), Rational(1, 4)},
                           {MapFunction::parse("3421"), Rational(1, 4)}});
}

bool non_increasing(const std::vector<std::size_t>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1]) return false;
  return true;
}

// Propp-Wilson written the obvious way: for each horizon recompute
// F_1 ∘ ... ∘ F_t from scratch.
CoalescenceRecord naive_cftp(const CouplingSampler& sampler, const RngStream& stream, std::uint64_t t_max) {
  CoalescenceRecord rec;
  rec.cutoff = t_max;
  for (std::uint64_t t = 1;; t = std::min(2 * t, t_max)) {
    MapFunction g = MapFunction::identity(sampler.state_count());
    for (std::uint64_t s = 1; s <= t; ++s) {
      const MapFunction f = sampler.at(stream, s);
      std::vector<State> img(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) img[i] = g(f(i));  // g after F_s
      g = MapFunction(img);
    }
    if (g.is_constant()) {
      rec.time = t;
      rec.terminal_state = g(0);
      return rec;
    }
    if (t == t_max) return rec;
  }
}

}  // namespace

TEST_CASE("philox4x64-10 known answers") {
  // values from an independent implementation (numpy's Philox)
  const auto a = philox4x64({1, 0, 0, 0}, {0, 0});
  CHECK(a[0] == 0x02f4ba6408e4d89bull);
  CHECK(a[1] == 0x3dd62b0b9ca8c5b2ull);
  CHECK(a[2] == 0x1c8667a55d902e79ull);
  CHECK(a[3] == 0x907d7a052fd5b4dcull);
  const auto b = philox4x64({2, 0, 0, 0}, {0, 0});
  CHECK(b[0] == 0x809bf322883987c3ull);
  CHECK(b[3] == 0xfc6ed66767a457bcull);
  const auto c = philox4x64({6, 7, 0, 0}, {123456789, 42});
  CHECK(c[0] == 0x7f08023a91f2cae7ull);
  CHECK(c[1] == 0x14627c28eea6eba3ull);
  CHECK(c[2] == 0x7a93ad6679c07c97ull);
  CHECK(c[3] == 0x4c054ecda9365617ull);
}

TEST_CASE("counter-based streams") {
  const RngStream s(99);
  auto a = s.substream(5), b = s.substream(5), c = s.substream(6);
  std::vector<std::uint64_t> xa, xb, xc;
  for (int k = 0; k < 10; ++k) {
    xa.push_back(a());
    xb.push_back(b());
    xc.push_back(c());
  }
  CHECK(xa == xb);
  CHECK(xa != xc);
  CHECK(s.derive(1).substream(0)() != s.derive(2).substream(0)());
  CHECK(s.derive(1).substream(0)() == RngStream(99).derive(1).substream(0)());
  CHECK(splitmix64(0) != splitmix64(1));

  auto r = s.substream(0);
  std::vector<int> counts(6, 0);
  for (int k = 0; k < 60000; ++k) ++counts[r.below(6)];
  for (int x : counts) CHECK(std::abs(x - 10000) < 500);
  const mpz_class big = mpz_class(1) << 100;
  for (int k = 0; k < 100; ++k) {
    const mpz_class v = r.below(big);
    CHECK(v >= 0);
    CHECK(v < big);
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(r.below(mpz_class(1)) == 0);
}

TEST_CASE("DiscreteSampler") {
  const std::vector<Rational> w = {Rational(1, 6), Rational(1, 2), Rational(1, 3)};
  const DiscreteSampler d(w);
  auto r = RngStream(5).substream(0);
  std::vector<int> counts(3, 0);
  for (int k = 0; k < 60000; ++k) ++counts[d.draw(r)];
  CHECK(std::abs(counts[0] - 10000) < 600);
  CHECK(std::abs(counts[1] - 30000) < 800);
  CHECK(std::abs(counts[2] - 20000) < 700);

  // denominators beyond 64 bits
  const mpz_class den = mpz_class(3) << 80;
  const std::vector<Rational> huge = {Rational(1, 3), Rational(mpz_class(2) << 80, den)};
  const DiscreteSampler h(huge);
  int first = 0;
  for (int k = 0; k < 30000; ++k) first += h.draw(r) == 0;
  CHECK(std::abs(first - 10000) < 600);
}

TEST_CASE("sample_function") {
  const auto f = MapFunction::parse("3141");
  const RngStream s(1);
  for (std::uint64_t t = 1; t < 20; ++t) CHECK(sample_function(ExplicitCoupling::dirac(f), s, t) == f);

  const GrandCoupling half = ExplicitCoupling({{MapFunction::parse("12"), Rational(1, 2)}, {MapFunction::parse("21"), Rational(1, 2)}});
  for (std::uint64_t t = 1; t < 20; ++t) CHECK(sample_function(half, s, t) == sample_function(half, RngStream(1), t));

  const auto perm = permutation_coupling(StochasticMatrix::lazy_cycle(3));
  int first = 0;
  for (std::uint64_t t = 1; t <= 4000; ++t) {
    const auto g = sample_function(perm, s, t);
    CHECK((g.to_string() == "123" || g.to_string() == "231"));
    first += g.to_string() == "123";
  }
  CHECK(std::abs(first - 2000) < 200);

  // block form draws only functions in the expansion, with matching rates
  const auto mu = uniform_divisor_coupling(4, 2);
  const CouplingSampler sampler(mu);
  const ExplicitCoupling ex = expand(mu);
  std::map<MapFunction, int> seen;
  for (std::uint64_t t = 1; t <= 32000; ++t) ++seen[sampler.at(s, t)];
  CHECK(seen.size() == 32);
  for (const auto& [g, c] : seen) {
    CHECK(ex.support().contains(g));
    CHECK(std::abs(c - 1000) < 150);
  }
}

TEST_CASE("forward and backward coalescence") {
  const RngStream s(2);
  for (std::size_t n = 2; n <= 5; ++n) {
    const CouplingSampler perms(uniform_divisor_coupling(n, n));
    const CouplingSampler iid(uniform_divisor_coupling(n, 1));
    const auto fwd = forward_coalescence(perms, s, 500, true);
    CHECK_FALSE(fwd.coalesced());
    CHECK(fwd.cutoff == 500);
    CHECK(forward_coalescence(iid, s, 100000).coalesced());
    CHECK(backward_coalescence(iid, s, 100000).coalesced());
  }
  const CouplingSampler constant(ExplicitCoupling::dirac(MapFunction::constant(3, 2)));
  const auto rec = forward_coalescence(constant, s, 10);
  CHECK(rec.time == 1u);
  CHECK(rec.terminal_state == 2u);
}

TEST_CASE("partition traces never increase") {
  std::mt19937_64 gen(71);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = oracle::random_stochastic(2 + rep % 5, gen);
    const CouplingSampler sampler(doeblin_coupling(p, DoeblinMode::Lazy));
    const auto f = forward_coalescence(sampler, RngStream(rep), 200, true);
    const auto b = backward_coalescence(sampler, RngStream(rep), 200, true);
    CHECK(non_increasing(f.partition_trace));
    CHECK(non_increasing(b.partition_trace));
    if (f.coalesced()) CHECK(f.partition_trace.back() == 1);
  }
}

TEST_CASE("cftp reuses F_s across rounds and matches the from-scratch version") {
  std::mt19937_64 gen(73);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rep % 5;
    const auto p = oracle::random_stochastic(n, gen);
    const CouplingSampler sampler(doeblin_coupling(p, DoeblinMode::Lazy));
    const RngStream stream(1000 + rep);
    std::map<std::uint64_t, MapFunction> first_draw;
    bool reused = true;
    const auto rec = cftp_run(sampler, stream, 300, [&](std::uint64_t s, const MapFunction& f) {
      const auto [it, fresh] = first_draw.emplace(s, f);
      if (!fresh && !(it->second == f)) reused = false;
    });
    CHECK(reused);
    const auto expect = naive_cftp(sampler, stream, 300);
    CHECK(rec.time == expect.time);
    CHECK(rec.terminal_state == expect.terminal_state);
  }
}

TEST_CASE("cftp determinism and trivial cases") {
  const auto c3 = doeblin_coupling(StochasticMatrix::lazy_cycle(3));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = cftp_sample(c3, RngStream(seed));
    const auto b = cftp_sample(c3, RngStream(seed));
    CHECK(a.time == b.time);
    CHECK(a.terminal_state == b.terminal_state);
  }
  const auto one = cftp_sample(ExplicitCoupling::dirac(MapFunction::constant(4, 0)), RngStream(3));
  CHECK(one.terminal_state == 0u);
  CHECK(one.time == 1u);
}

TEST_CASE("guard: impossible coalescence returns immediately") {
  const auto perm = permutation_coupling(StochasticMatrix::lazy_cycle(3));
  const PerfectSampler guarded(perm);
  CHECK_FALSE(guarded.can_coalesce());
  CHECK(guarded.known_coalescence_number() == 3u);
  const auto rec = guarded.sample(RngStream(1));
  CHECK_FALSE(rec.coalesced());
  // unguarded it just hits the cutoff
  CHECK_FALSE(cftp_run(CouplingSampler(perm), RngStream(1), 1000).coalesced());

  const PerfectSampler bundles(two_bundles());
  CHECK_FALSE(bundles.can_coalesce());
  CHECK(bundles.known_coalescence_number() == 2u);

  const PerfectSampler periodic(doeblin_coupling(parse_matrix("0 1\n1 0")));
  CHECK_FALSE(periodic.can_coalesce());
  CHECK_FALSE(periodic.sample(RngStream(4)).coalesced());

  // too large to expand: the guard stays open and coalescence still happens
  SamplerOptions small;
  small.support_cap = 4;
  const PerfectSampler open(doeblin_coupling(StochasticMatrix::uniform(3), DoeblinMode::Lazy), small);
  CHECK(open.can_coalesce());
  CHECK(open.sample(RngStream(5)).coalesced());
}

TEST_CASE("histograms do not depend on the thread count") {
  const PerfectSampler sampler(doeblin_coupling(StochasticMatrix::lazy_cycle(4), DoeblinMode::Lazy));
  const auto a = cftp_histogram(sampler, RngStream(8), 3000, 1);
  const auto b = cftp_histogram(sampler, RngStream(8), 3000, 3);
  CHECK(a.counts == b.counts);
  CHECK(a.samples == 3000);
}

TEST_CASE("cftp chi-square goodness of fit") {
  const auto p = parse_matrix("1/2 1/4 1/4\n1/3 0 2/3\n1/5 3/5 1/5");
  const auto pi = invariant_distribution(p);
  const PerfectSampler sampler(doeblin_coupling(p));
  REQUIRE(sampler.can_coalesce());
  const std::uint64_t n = 100'000;
  const auto h = cftp_histogram(sampler, RngStream(20240101), n);
  REQUIRE(h.did_not_coalesce == 0);
  double stat = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double expected = to_double(pi[i]) * double(n);
    stat += (double(h.counts[i]) - expected) * (double(h.counts[i]) - expected) / expected;
  }
  const boost::math::chi_squared dist(2);
  CHECK(stat < boost::math::quantile(dist, 1 - 0.001));
  CHECK(total_variation(h, pi) < 0.01);
}

TEST_CASE("equidistribution_check") {
  const auto constant = equidistribution_check(ExplicitCoupling::dirac(MapFunction::constant(3, 1)), 100, 10, RngStream(1));
  CHECK(constant.max_cdf_gap == 0);
  CHECK(constant.backward_times.at(1) == 100);
  CHECK(constant.forward_times.at(1) == 100);
  CHECK(constant.pass);

  const auto perms = equidistribution_check(uniform_divisor_coupling(4, 4), 50, 100, RngStream(1));
  CHECK(perms.backward_censored == 50);
  CHECK(perms.forward_censored == 50);

  const auto p2 = equidistribution_check(doeblin_coupling(StochasticMatrix::uniform(2)), 5000, 1000, RngStream(9), 0.03);
  CHECK(p2.pass);
  CHECK(p2.backward_censored == 0);
}

TEST_CASE("trajectory diagrams") {
  const auto all_in_one = emit_trajectory_diagram(ExplicitCoupling::dirac(MapFunction::constant(3, 0)), RngStream(1), 2,
                                                  DiagramFormat::Ascii);
  CHECK(all_in_one.find("k_t: 3 1 1") != std::string::npos);
  CHECK(all_in_one.find("t0->t1: 1->1 2->1 3->1") != std::string::npos);

  const auto perms = emit_trajectory_diagram(uniform_divisor_coupling(4, 4), RngStream(2), 8, DiagramFormat::Ascii);
  CHECK(perms.find("k_t: 4 4 4 4 4 4 4 4 4") != std::string::npos);

  // 3412 is a permutation, so the drop to two bundles happens at a random step
  const auto bundles = emit_trajectory_diagram(two_bundles(), RngStream(3), 40, DiagramFormat::Ascii);
  const auto at = bundles.find("k_t:");
  REQUIRE(at != std::string::npos);
  std::istringstream line(bundles.substr(at + 4, bundles.find('\n', at) - at - 4));
  std::vector<std::size_t> ks;
  for (std::size_t k; line >> k;) ks.push_back(k);
  CHECK(ks.size() == 41);
  CHECK(non_increasing(ks));
  CHECK(ks.back() == 2);

  const auto dot = emit_trajectory_diagram(ExplicitCoupling::dirac(MapFunction::constant(3, 0)), RngStream(1), 2,
                                           DiagramFormat::Dot);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("s1_t1 [label=\"1\", penwidth=3") != std::string::npos);

  CHECK_THROWS_AS(emit_trajectory_diagram(ExplicitCoupling::dirac(MapFunction::identity(51)), RngStream(1), 2,
                                          DiagramFormat::Ascii),
                  Error);
}
