#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "coalesce/rational.hpp"

namespace coalesce {

/// Dense exact simplex over { x >= 0 : A x = b } with Bland's rule, so it
/// always terminates. Phase 1 runs once at construction; any number of
/// objectives can then be maximized from the current feasible basis.
class ExactSimplex {
 public:
  /// Throws DimensionMismatch on ragged input.
  ExactSimplex(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b);

  bool feasible() const noexcept { return feasible_; }

  /// Maximum of objective . x, or nullopt if unbounded. Requires feasible().
  std::optional<Rational> maximize(const std::vector<Rational>& objective);

  /// Current basic solution (length = number of variables).
  std::vector<Rational> solution() const;

  std::size_t pivots() const noexcept { return pivots_; }

 private:
  void pivot(std::size_t row, std::size_t col);
  // Runs simplex iterations on cost row `cost` over columns [0, active_cols).
  // Returns false if unbounded.
  bool optimize(std::vector<Rational>& cost, std::size_t active_cols);

  std::size_t vars_ = 0;
  std::size_t cols_ = 0;  // vars_ + artificials during phase 1
  std::vector<std::vector<Rational>> tab_;  // rows: [coeffs..., rhs]
  std::vector<std::size_t> basis_;
  bool feasible_ = false;
  std::size_t pivots_ = 0;
};

}  // namespace coalesce
