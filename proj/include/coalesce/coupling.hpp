#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "coalesce/map_function.hpp"
#include "coalesce/partition.hpp"
#include "coalesce/rational.hpp"
#include "coalesce/stochastic_matrix.hpp"

namespace coalesce {

inline constexpr std::size_t kDefaultSupportCap = std::size_t{1} << 20;

/// Non-empty set of functions on a common state set, sorted and deduplicated.
class Support {
 public:
  /// Throws MalformedInput if empty, DimensionMismatch on mixed sizes.
  explicit Support(std::vector<MapFunction> functions);

  std::size_t state_count() const noexcept { return functions_.front().size(); }
  std::size_t size() const noexcept { return functions_.size(); }
  const std::vector<MapFunction>& functions() const noexcept { return functions_; }
  const MapFunction& operator[](std::size_t i) const { return functions_[i]; }
  bool contains(const MapFunction& f) const;

  bool operator==(const Support& other) const = default;

 private:
  std::vector<MapFunction> functions_;
};

struct WeightedFunction {
  MapFunction function;
  Rational weight;

  bool operator==(const WeightedFunction& other) const = default;
};

/// Finitely supported measure written out term by term. Terms are sorted by
/// function; weights are strictly positive and sum to exactly 1.
class ExplicitCoupling {
 public:
  /// Throws MalformedInput on zero/negative weights, duplicates or a total
  /// other than 1; DimensionMismatch on mixed sizes.
  explicit ExplicitCoupling(std::vector<WeightedFunction> terms);

  static ExplicitCoupling dirac(const MapFunction& f);

  std::size_t state_count() const noexcept { return terms_.front().function.size(); }
  const std::vector<WeightedFunction>& terms() const noexcept { return terms_; }
  Support support() const;

  bool operator==(const ExplicitCoupling& other) const = default;

 private:
  std::vector<WeightedFunction> terms_;
};

struct WeightedPermutation {
  std::vector<std::size_t> permutation;  // block r goes to block permutation[r]
  Rational weight;

  bool operator==(const WeightedPermutation& other) const = default;
};

/// Law of the random block permutation: either explicit terms or uniform over
/// all l! permutations (kept symbolic so large l never enumerates).
class BlockPermutationLaw {
 public:
  explicit BlockPermutationLaw(std::vector<WeightedPermutation> terms);
  static BlockPermutationLaw uniform(std::size_t blocks);

  std::size_t block_count() const noexcept { return blocks_; }
  bool is_uniform() const noexcept { return uniform_; }
  /// Explicit terms; empty when uniform.
  const std::vector<WeightedPermutation>& terms() const noexcept { return terms_; }
  /// Probability that block r is sent to block s.
  Rational marginal(std::size_t r, std::size_t s) const;
  /// Enumerates uniform laws; throws SupportTooLarge past the cap.
  std::vector<WeightedPermutation> enumerate(std::size_t cap) const;

  bool operator==(const BlockPermutationLaw& other) const = default;

 private:
  BlockPermutationLaw() = default;

  std::size_t blocks_ = 0;
  bool uniform_ = false;
  std::vector<WeightedPermutation> terms_;
};

/// Draw a block permutation Π; then each state i in block r independently
/// moves to j in block Π(r) with probability proportional to within[i][j].
class BlockCoupling {
 public:
  /// Throws MalformedInput / DimensionMismatch when some conditional is
  /// undefined (no within-mass on a block the law can send i's block to).
  BlockCoupling(Partition partition, BlockPermutationLaw law, std::vector<std::vector<Rational>> within);

  std::size_t state_count() const noexcept { return partition_.state_count(); }
  const Partition& partition() const noexcept { return partition_; }
  const BlockPermutationLaw& law() const noexcept { return law_; }
  const std::vector<std::vector<Rational>>& within() const noexcept { return within_; }
  /// Total within-mass of state i on block s.
  Rational within_mass(std::size_t i, std::size_t s) const;

  bool operator==(const BlockCoupling& other) const = default;

 private:
  Partition partition_;
  BlockPermutationLaw law_;
  std::vector<std::vector<Rational>> within_;
};

/// A probability measure on functions S -> S.
class GrandCoupling {
 public:
  GrandCoupling(ExplicitCoupling form) : form_(std::move(form)) {}  // NOLINT
  GrandCoupling(BlockCoupling form) : form_(std::move(form)) {}     // NOLINT

  std::size_t state_count() const;
  bool is_explicit() const noexcept { return std::holds_alternative<ExplicitCoupling>(form_); }
  const ExplicitCoupling& explicit_form() const { return std::get<ExplicitCoupling>(form_); }
  const BlockCoupling& block_form() const { return std::get<BlockCoupling>(form_); }

  bool operator==(const GrandCoupling& other) const = default;

 private:
  std::variant<ExplicitCoupling, BlockCoupling> form_;
};

/// q[i][j] = mu{f : f(i) = j}. Block forms are computed from marginals
/// without expansion.
StochasticMatrix induced_matrix(const GrandCoupling& mu);

/// Throws DimensionMismatch.
bool is_consistent(const GrandCoupling& mu, const StochasticMatrix& p);

enum class DoeblinMode { Explicit, Lazy };

/// Product measure mu{f} = prod_i p[i][f(i)]. Lazy mode returns the
/// equivalent one-block BlockCoupling. Throws SupportTooLarge (explicit only).
GrandCoupling doeblin_coupling(const StochasticMatrix& p, DoeblinMode mode = DoeblinMode::Explicit,
                               std::size_t cap = kDefaultSupportCap);

/// Coupling supported on permutations, weights from the Birkhoff
/// decomposition. Throws NotDoublyStochastic.
GrandCoupling permutation_coupling(const StochasticMatrix& p);

/// Every function with positive weight, with its weight. Throws
/// SupportTooLarge when the expansion would exceed cap.
ExplicitCoupling expand(const GrandCoupling& mu, std::size_t cap = kDefaultSupportCap);

Support expand_support(const GrandCoupling& mu, std::size_t cap = kDefaultSupportCap);

/// Number of functions in the support, saturating at cap + 1.
std::size_t support_size(const GrandCoupling& mu, std::size_t cap = kDefaultSupportCap);

}  // namespace coalesce
