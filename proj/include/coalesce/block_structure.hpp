#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "coalesce/coupling.hpp"
#include "coalesce/partition.hpp"
#include "coalesce/stochastic_matrix.hpp"

namespace coalesce {

/// Quotient chain on blocks: lambda[r][s] = sum_{j in S_s} p[i][j], i in S_r.
using BlockMatrix = StochasticMatrix;

/// States i and other_state share block `from_block` but put different mass
/// on block `to_block`. All indices 0-based.
struct LumpabilityViolation {
  std::size_t from_block;
  std::size_t to_block;
  std::size_t state;
  std::size_t other_state;
};

std::variant<BlockMatrix, LumpabilityViolation> check_lumpability(const StochasticMatrix& p,
                                                                  const Partition& partition);

/// Lumpable with a doubly stochastic block matrix.
bool check_block_conditions(const StochasticMatrix& p, const Partition& partition);

struct PermutationTerm {
  MapFunction permutation;
  Rational weight;
};

struct BirkhoffDecomposition {
  std::vector<PermutationTerm> terms;
};

/// Greedy peeling: repeatedly take the lexicographically least perfect
/// matching on the positive entries of the residual and subtract its least
/// entry times that permutation. Each step moves to a proper face of the
/// Birkhoff polytope, so at most (n-1)^2 + 1 terms are produced.
/// Throws NotDoublyStochastic.
BirkhoffDecomposition birkhoff_decomposition(const StochasticMatrix& d);

/// Block measure for P on the partition: block permutation law from the
/// Birkhoff decomposition of the block matrix, then state i in S_r moves to
/// j in S_s with probability p[i][j] / lambda[r][s]. Never expanded.
/// Throws BlockConditionsFail.
GrandCoupling construct_block_measure(const StochasticMatrix& p, const Partition& partition);

/// Block image of each block under f when f maps blocks into blocks
/// bijectively; nullopt otherwise.
std::optional<std::vector<std::size_t>> block_permutation_of(const MapFunction& f, const Partition& partition);

/// Every support function permutes the blocks and k(mu) equals the block
/// count. Throws SupportTooLarge past cap.
bool is_block_measure(const GrandCoupling& mu, const Partition& partition,
                      std::size_t cap = kDefaultSupportCap);

/// Consecutive blocks of size n/l, uniform block permutation, uniform target
/// inside the image block. Consistent with the all-1/n matrix. Throws
/// NotADivisor.
GrandCoupling uniform_divisor_coupling(std::size_t n, std::size_t l);

}  // namespace coalesce
