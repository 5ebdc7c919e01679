#include "coalesce/reproduce.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "coalesce/block_structure.hpp"
#include "coalesce/cftp.hpp"
#include "coalesce/coupling_io.hpp"
#include "coalesce/error.hpp"
#include "coalesce/kset.hpp"
#include "coalesce/semigroup.hpp"

namespace coalesce {

namespace {

std::string set_string(const std::vector<std::size_t>& values) {
  std::string out = "{";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(values[k]);
  }
  return out + "}";
}

std::string partitions_string(const std::vector<Partition>& parts) {
  std::string out = "{";
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += ", ";
    out += "{" + parts[k].to_string() + "}";
  }
  return out + "}";
}

std::string fixed(double v) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << v;
  return os.str();
}

Support two_bundle_support() { return parse_function_list("3434 4334 3412 3421", 4); }

struct Check {
  std::string id;
  std::string description;
  std::function<ReproductionRow(const ReproductionOptions&, const StochasticMatrix&)> run;
};

ReproductionRow row(std::string expected, std::string computed) {
  ReproductionRow r;
  r.pass = expected == computed;
  r.expected = std::move(expected);
  r.computed = std::move(computed);
  return r;
}

std::vector<Check> checks() {
  std::vector<Check> out;
  out.push_back({"kset-lazy-cycle-3", "K(P) of the 3-state lazy cycle by exhaustive support search",
                 [](const ReproductionOptions& o, const StochasticMatrix& c3) {
                   const KSetReport r = k_set_exact(c3, kDefaultExactCap, {}, o.threads);
                   return row("{1,3}", set_string(r.member_values()));
                 }});
  out.push_back({"kset-lazy-cycle-4", "K(P) of the 4-state lazy cycle by exhaustive support search",
                 [](const ReproductionOptions& o, const StochasticMatrix&) {
                   const KSetReport r = k_set_exact(StochasticMatrix::lazy_cycle(4), kDefaultExactCap, {}, o.threads);
                   return row("{1,2,4}", set_string(r.member_values()));
                 }});
  out.push_back({"two-classes-cycle-4",
                 "1234,2244,1331,2341 at 1/4 each on the 4-state lazy cycle",
                 [](const ReproductionOptions&, const StochasticMatrix&) {
                   std::vector<WeightedFunction> terms;
                   for (const char* f : {"1234", "2244", "1331", "2341"})
                     terms.push_back({MapFunction::parse(f), Rational(1, 4)});
                   const GrandCoupling mu = ExplicitCoupling(std::move(terms));
                   const StochasticMatrix p = StochasticMatrix::lazy_cycle(4);
                   // 1331 sends 1 and 2 to different blocks of {1,2},{3,4}; with two
                   // limiting partitions there is no partition it could be a block
                   // measure for.
                   const Support s = expand_support(mu);
                   const auto parts = limiting_partitions(s);
                   bool block = false;
                   for (const auto& part : all_partitions(4)) block = block || is_block_measure(mu, part);
                   return row("consistent k=2 {{{1,2},{3,4}}, {{1,4},{2,3}}} non-block",
                              std::string(is_consistent(mu, p) ? "consistent" : "inconsistent") +
                                  " k=" + std::to_string(coalescence_number(s)) + " " + partitions_string(parts) +
                                  (block ? " block" : " non-block"));
                 }});
  out.push_back({"two-bundles", "support {3434,4334,3412,3421}: k and possible limiting partitions",
                 [](const ReproductionOptions&, const StochasticMatrix&) {
                   const Support s = two_bundle_support();
                   return row("k=2 {{{1,3},{2,4}}, {{1,4},{2,3}}}",
                              "k=" + std::to_string(coalescence_number(s)) + " " +
                                  partitions_string(limiting_partitions(s)));
                 }});
  out.push_back({"divisor-blocks", "uniform block couplings on P_n, n = 2..12, every l | n",
                 [](const ReproductionOptions&, const StochasticMatrix&) {
                   std::size_t failures = 0, witnesses = 0;
                   for (std::size_t n = 2; n <= 12; ++n) {
                     const KSetReport r = divisor_members(n);
                     for (const auto& [l, w] : r.members) {
                       ++witnesses;
                       if (n <= 6 && !w.verified) ++failures;
                     }
                   }
                   return row("all consistent, k verified for n<=6",
                              failures == 0 ? "all consistent, k verified for n<=6"
                                            : std::to_string(failures) + " of " + std::to_string(witnesses) +
                                                  " unverified");
                 }});
  out.push_back({"uniform-exclusion", "n-1 excluded from K(P_n) by the single-pair criterion, n = 3..8",
                 [](const ReproductionOptions&, const StochasticMatrix&) {
                   std::vector<std::size_t> excluded;
                   for (std::size_t n = 3; n <= 8; ++n)
                     if (single_pair_excluded(StochasticMatrix::uniform(n))) excluded.push_back(n);
                   return row("{3,4,5,6,7,8}", set_string(excluded));
                 }});
  out.push_back({"full-rank-doubly-stochastic", "n in K(P) iff P doubly stochastic",
                 [](const ReproductionOptions& o, const StochasticMatrix& c3) {
                   const auto non_ds = parse_matrix("1/2 1/2\n1 0");
                   const bool a = k_set_exact(c3, kDefaultExactCap, {}, o.threads).members.contains(3);
                   const bool b = k_set_exact(non_ds, kDefaultExactCap, {}, o.threads).members.contains(2);
                   return row("3-cycle: yes, non-doubly-stochastic 2-state: no",
                              std::string("3-cycle: ") + (a ? "yes" : "no") +
                                  ", non-doubly-stochastic 2-state: " + (b ? "yes" : "no"));
                 }});
  out.push_back({"permutation-coupling-cycle-3", "Birkhoff decomposition of the 3-state lazy cycle",
                 [](const ReproductionOptions&, const StochasticMatrix& c3) {
                   if (!is_doubly_stochastic(c3)) return row("{123:1/2, 231:1/2}", "not doubly stochastic");
                   const auto d = birkhoff_decomposition(c3);
                   std::vector<std::string> terms;
                   for (const auto& t : d.terms) terms.push_back(t.permutation.to_string() + ":" + t.weight.get_str());
                   std::sort(terms.begin(), terms.end());
                   std::string computed = "{";
                   for (std::size_t k = 0; k < terms.size(); ++k) computed += (k ? ", " : "") + terms[k];
                   return row("{123:1/2, 231:1/2}", computed + "}");
                 }});
  out.push_back({"three-state-blocks", "every feasible support of the 3-state lazy cycle has one limiting partition",
                 [](const ReproductionOptions& o, const StochasticMatrix& c3) {
                   std::size_t feasible = 0, multi = 0;
                   k_set_exact(c3, kDefaultExactCap, [&](const FeasibleSupport& fs) {
                     ++feasible;
                     if (limiting_partitions(fs.support).size() != 1) ++multi;
                   }, o.threads);
                   return row("0 exceptions", std::to_string(multi) + " exceptions");
                 }});
  out.push_back({"permutation-vs-iid", "P_5: uniform permutations never coalesce, iid uniform maps always do",
                 [](const ReproductionOptions& o, const StochasticMatrix&) {
                   const CouplingSampler perms(uniform_divisor_coupling(5, 5));
                   const CouplingSampler iid(uniform_divisor_coupling(5, 1));
                   const RngStream base(o.seed);
                   std::size_t perm_censored = 0, iid_coalesced = 0;
                   for (std::uint64_t r = 0; r < 100; ++r) {
                     if (!forward_coalescence(perms, base.derive(2 * r), 10'000).coalesced()) ++perm_censored;
                     if (forward_coalescence(iid, base.derive(2 * r + 1), 10'000).coalesced()) ++iid_coalesced;
                   }
                   return row("100/100 censored, 100/100 coalesced",
                              std::to_string(perm_censored) + "/100 censored, " + std::to_string(iid_coalesced) +
                                  "/100 coalesced");
                 }});
  out.push_back({"cftp-law", "CFTP with the product coupling of the 3-state lazy cycle: TV to pi < 0.02",
                 [](const ReproductionOptions& o, const StochasticMatrix& c3) {
                   if (!is_irreducible(c3)) return row("TV < 0.02", "matrix not irreducible");
                   const PerfectSampler sampler(doeblin_coupling(c3));
                   const auto h = cftp_histogram(sampler, RngStream(o.seed), 100'000, o.threads);
                   const double tv = total_variation(h, invariant_distribution(c3));
                   const bool uniform = invariant_distribution(c3) == ProbabilityVector::uniform(3);
                   ReproductionRow r = row("TV < 0.02, pi uniform", std::string(tv < 0.02 ? "TV < 0.02" : "TV >= 0.02") +
                                                                        (uniform ? ", pi uniform" : ", pi not uniform"));
                   r.computed += " (TV = " + fixed(tv) + ")";
                   r.pass = tv < 0.02 && uniform;
                   return r;
                 }});
  out.push_back({"equidistribution", "C and T for the product coupling of P_2: max CDF gap < 0.02",
                 [](const ReproductionOptions& o, const StochasticMatrix&) {
                   const auto rep = equidistribution_check(doeblin_coupling(StochasticMatrix::uniform(2)), 50'000,
                                                           1'000, RngStream(o.seed), 0.02, o.threads);
                   ReproductionRow r = row("gap < 0.02", rep.pass ? "gap < 0.02" : "gap >= 0.02");
                   r.computed += " (gap = " + fixed(rep.max_cdf_gap) + ")";
                   r.pass = rep.pass;
                   return r;
                 }});
  return out;
}

}  // namespace

std::vector<std::string> reproduction_ids() {
  std::vector<std::string> ids;
  for (const auto& c : checks()) ids.push_back(c.id);
  return ids;
}

std::vector<ReproductionRow> run_reproductions(const ReproductionOptions& options) {
  const StochasticMatrix c3 = options.lazy_cycle3.value_or(StochasticMatrix::lazy_cycle(3));
  const auto all = checks();
  if (options.only && std::none_of(all.begin(), all.end(), [&](const Check& c) { return c.id == *options.only; })) {
    throw Error(ErrorKind::MalformedInput, "unknown reproduction id '" + *options.only + "'");
  }
  std::vector<ReproductionRow> rows;
  for (const auto& c : all) {
    if (options.only && c.id != *options.only) continue;
    ReproductionRow r;
    try {
      r = c.run(options, c3);
    } catch (const Error& e) {
      r.computed = std::string("error: ") + e.what();
      r.pass = false;
    }
    r.id = c.id;
    r.description = c.description;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace coalesce
