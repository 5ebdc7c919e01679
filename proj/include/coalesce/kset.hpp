#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coalesce/coupling.hpp"
#include "coalesce/feasibility.hpp"
#include "coalesce/rng.hpp"
#include "coalesce/semigroup.hpp"
#include "coalesce/stochastic_matrix.hpp"

namespace coalesce {

inline constexpr std::uint64_t kDefaultExactCap = std::uint64_t{1} << 20;

enum class ExclusionReason { Exhaustive, Aperiodicity, DoubleStochasticity, SinglePairCriterion };

const char* to_string(ExclusionReason reason);

struct KWitness {
  GrandCoupling coupling;
  std::optional<Support> support;  // set when the support was enumerated
  bool verified = false;           // consistency and k re-checked exactly
  std::string source;
};

struct KSetReport {
  std::size_t n = 0;
  std::map<std::size_t, KWitness> members;
  std::map<std::size_t, ExclusionReason> exclusions;
  bool exact = false;
  std::uint64_t supports_enumerated = 0;
  std::uint64_t supports_passing_filter = 0;
  std::uint64_t feasible_supports = 0;

  std::vector<std::size_t> member_values() const;
};

/// A support that admits strictly positive consistent weights.
struct FeasibleSupport {
  Support support;
  FeasibilityWitness weights;
  std::size_t k;
  PairSet coalescing_pairs;
};

using FeasibleSupportVisitor = std::function<void(const FeasibleSupport&)>;

/// All f with p[i][f(i)] > 0 for every i, in lexicographic order. Throws
/// SupportTooLarge past cap.
Support allowed_functions(const StochasticMatrix& p, std::size_t cap = kDefaultSupportCap);

/// Exhaustive K(P): every non-empty subset of allowed_functions(P), by size
/// then lexicographically, is filtered, tested for strictly positive weights,
/// and assigned k. A visitor sees every feasible support in that order.
/// Without a visitor the search stops once every value between k(allowed)
/// and n is a member. Throws BudgetExceeded if 2^|allowed| - 1 > cap.
KSetReport k_set_exact(const StochasticMatrix& p, std::uint64_t cap = kDefaultExactCap,
                       const FeasibleSupportVisitor& visit = {}, unsigned threads = 0);

struct CertificateOptions {
  /// Set partitions are enumerated for block-measure members up to this n.
  std::size_t max_partition_states = 9;
  /// Largest support expanded to verify a witness's k.
  std::size_t verify_cap = std::size_t{1} << 16;
};

/// Certificate-backed partial report (exact = false): 1 by aperiodicity, n by
/// double stochasticity, n-1 excluded by the single-pair criterion, and
/// block-measure members for every partition meeting the block conditions.
KSetReport k_set_certificates(const StochasticMatrix& p, const CertificateOptions& options = {});

/// Exact when the subset budget allows, certificates otherwise.
KSetReport k_set(const StochasticMatrix& p, std::uint64_t cap = kDefaultExactCap);

/// Necessary condition for {a,b} to be the only coalescing pair:
/// sum_{j∉{a,b}} p[a][j] = sum_{j∉{a,b}} p[b][j] = sum_{i∉{a,b}} (p[i][a] + p[i][b]).
bool single_pair_condition(const StochasticMatrix& p, std::size_t a, std::size_t b);

/// True when single_pair_condition fails for every pair, so n-1 ∉ K(P).
bool single_pair_excluded(const StochasticMatrix& p);

struct NonBlockSearchReport {
  std::uint64_t trials = 0;
  std::uint64_t feasible = 0;
  /// First feasible support found that is a block measure for no partition.
  std::optional<FeasibilityWitness> non_block;
};

/// Random search for a consistent coupling that is not a block measure:
/// each trial draws a random subset of allowed_functions(P) of size n..2n^2,
/// keeps it if strictly positive weights exist, and tests whether its unique
/// limiting partition makes it a block measure. Trial t uses stream.derive(t).
NonBlockSearchReport search_non_block(const StochasticMatrix& p, std::uint64_t trials, const RngStream& stream,
                                      std::size_t allowed_cap = kDefaultSupportCap);

/// Members l | n of K(P_n) with uniform_divisor_coupling witnesses; k is
/// verified by expansion when the support fits verify_cap.
KSetReport divisor_members(std::size_t n, std::size_t verify_cap = std::size_t{1} << 16);

}  // namespace coalesce
