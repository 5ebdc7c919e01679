#pragma once

#include <optional>

#include "coalesce/coupling.hpp"
#include "coalesce/stochastic_matrix.hpp"

namespace coalesce {

/// Strictly positive weights on exactly the given support reproducing P.
using FeasibilityWitness = ExplicitCoupling;

/// False when some positive entry p[i][j] is hit by no function of the
/// support, or some function uses a zero entry. Necessary, not sufficient.
bool necessary_support_filter(const StochasticMatrix& p, const Support& support);

/// Weights alpha_f > 0 for every f in the support with sum_f alpha_f M_f = P,
/// or nullopt. Each coordinate is maximized over the consistency polytope and
/// the optimal vertices are averaged, which lands in the relative interior.
std::optional<FeasibilityWitness> feasible_weights(const StochasticMatrix& p, const Support& support);

}  // namespace coalesce
