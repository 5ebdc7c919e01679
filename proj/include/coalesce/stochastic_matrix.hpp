#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coalesce/rational.hpp"

namespace coalesce {

/// Square transition matrix with exact rational entries in [0,1] whose rows
/// each sum to exactly 1. States are 0-based here and 1-based in all text I/O.
class StochasticMatrix {
 public:
  /// Throws NonSquare, EntryOutOfRange or RowSumError.
  explicit StochasticMatrix(const std::vector<std::vector<Rational>>& rows);

  static StochasticMatrix identity(std::size_t n);
  /// Every entry 1/n.
  static StochasticMatrix uniform(std::size_t n);
  /// Stay with probability 1/2, otherwise step to the next state cyclically.
  static StochasticMatrix lazy_cycle(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const Rational> row(std::size_t i) const {
    return {entries_.data() + i * n_, n_};
  }
  bool positive(std::size_t i, std::size_t j) const { return sgn((*this)(i, j)) > 0; }

  std::vector<std::vector<Rational>> rows() const;

  /// Entry (i,j) of the result is entry (perm[i], perm[j]) of this matrix.
  StochasticMatrix relabeled(std::span<const std::size_t> perm) const;

  /// One row per line, entries separated by single spaces.
  std::string to_string() const;

  bool operator==(const StochasticMatrix& other) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Rational> entries_;
};

/// Rows of whitespace-separated rationals; '#' starts a comment; blank lines
/// are skipped.
StochasticMatrix parse_matrix(std::string_view text);

/// Strong connectivity of the directed graph of positive entries.
bool is_irreducible(const StochasticMatrix& p);

/// gcd of cycle lengths through state 0. Throws NotIrreducible.
std::size_t period(const StochasticMatrix& p);

inline bool is_aperiodic(const StochasticMatrix& p) { return is_irreducible(p) && period(p) == 1; }

bool is_doubly_stochastic(const StochasticMatrix& p);

class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<Rational> entries);

  static ProbabilityVector uniform(std::size_t n);

  std::size_t size() const noexcept { return entries_.size(); }
  const Rational& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Rational>& entries() const noexcept { return entries_; }

  bool operator==(const ProbabilityVector& other) const = default;

 private:
  std::vector<Rational> entries_;
};

/// Exact solution of pi P = pi, sum(pi) = 1. Throws NotIrreducible.
ProbabilityVector invariant_distribution(const StochasticMatrix& p);

}  // namespace coalesce
