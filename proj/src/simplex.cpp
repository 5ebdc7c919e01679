#include "coalesce/simplex.hpp"

#include "coalesce/error.hpp"

namespace coalesce {

ExactSimplex::ExactSimplex(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b) {
  const std::size_t m = a.size();
  if (b.size() != m) throw Error(ErrorKind::DimensionMismatch, "simplex: rhs length");
  vars_ = m ? a.front().size() : 0;
  for (const auto& row : a)
    if (row.size() != vars_) throw Error(ErrorKind::DimensionMismatch, "simplex: ragged constraint matrix");

  // Phase 1: one artificial per row, rhs made non-negative.
  cols_ = vars_ + m;
  tab_.assign(m, std::vector<Rational>(cols_ + 1, 0));
  basis_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = sgn(b[i]) < 0;
    for (std::size_t j = 0; j < vars_; ++j) tab_[i][j] = flip ? Rational(-a[i][j]) : a[i][j];
    tab_[i][vars_ + i] = 1;
    tab_[i][cols_] = flip ? Rational(-b[i]) : b[i];
    basis_[i] = vars_ + i;
  }
  // Reduced costs for "maximize -sum(artificials)": cost[j] = -sum_i tab[i][j]
  // over original columns, 0 on artificials; cost[cols_] = -sum(rhs).
  std::vector<Rational> cost(cols_ + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < vars_; ++j) cost[j] -= tab_[i][j];
    cost[cols_] -= tab_[i][cols_];
  }
  optimize(cost, cols_);
  feasible_ = sgn(cost[cols_]) == 0;
  if (!feasible_) return;

  // Drive zero-level artificials out of the basis; rows where that is
  // impossible are redundant and dropped.
  for (std::size_t i = 0; i < tab_.size();) {
    if (basis_[i] < vars_) {
      ++i;
      continue;
    }
    std::size_t col = vars_;
    for (std::size_t j = 0; j < vars_; ++j) {
      if (sgn(tab_[i][j]) != 0) {
        col = j;
        break;
      }
    }
    if (col < vars_) {
      pivot(i, col);
      ++i;
    } else {
      tab_.erase(tab_.begin() + static_cast<long>(i));
      basis_.erase(basis_.begin() + static_cast<long>(i));
    }
  }
  for (auto& row : tab_) {
    const Rational rhs = row[cols_];
    row.resize(vars_);
    row.push_back(rhs);
  }
  cols_ = vars_;
}

void ExactSimplex::pivot(std::size_t row, std::size_t col) {
  ++pivots_;
  auto& pr = tab_[row];
  const Rational inv = 1 / pr[col];
  for (auto& v : pr) v *= inv;
  for (std::size_t i = 0; i < tab_.size(); ++i) {
    if (i == row || sgn(tab_[i][col]) == 0) continue;
    const Rational factor = tab_[i][col];
    for (std::size_t j = 0; j <= cols_; ++j)
      if (sgn(pr[j]) != 0) tab_[i][j] -= factor * pr[j];
  }
  basis_[row] = col;
}

bool ExactSimplex::optimize(std::vector<Rational>& cost, std::size_t active_cols) {
  // cost[j] = c_B B^-1 A_j - c_j, so cost[j] < 0 means x_j can improve the
  // objective; cost[cols_] holds the current objective value.
  while (true) {
    std::size_t enter = active_cols;
    for (std::size_t j = 0; j < active_cols; ++j) {
      if (sgn(cost[j]) < 0) {
        enter = j;
        break;
      }
    }
    if (enter == active_cols) return true;

    std::size_t leave = tab_.size();
    Rational best_ratio;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (sgn(tab_[i][enter]) <= 0) continue;
      const Rational ratio = tab_[i][cols_] / tab_[i][enter];
      if (leave == tab_.size() || ratio < best_ratio ||
          (ratio == best_ratio && basis_[i] < basis_[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == tab_.size()) return false;
    pivot(leave, enter);
    const Rational factor = cost[enter];
    for (std::size_t j = 0; j <= cols_; ++j)
      if (sgn(tab_[leave][j]) != 0) cost[j] -= factor * tab_[leave][j];
  }
}

std::optional<Rational> ExactSimplex::maximize(const std::vector<Rational>& objective) {
  if (!feasible_) throw Error(ErrorKind::MalformedInput, "simplex: maximize on an infeasible system");
  if (objective.size() != vars_) throw Error(ErrorKind::DimensionMismatch, "simplex: objective length");
  std::vector<Rational> cost(cols_ + 1, 0);
  for (std::size_t j = 0; j < vars_; ++j) cost[j] = -objective[j];
  for (std::size_t i = 0; i < tab_.size(); ++i) {
    const Rational& cb = objective[basis_[i]];
    if (sgn(cb) == 0) continue;
    for (std::size_t j = 0; j <= cols_; ++j) cost[j] += cb * tab_[i][j];
  }
  if (!optimize(cost, cols_)) return std::nullopt;
  return cost[cols_];
}

std::vector<Rational> ExactSimplex::solution() const {
  std::vector<Rational> x(vars_, 0);
  for (std::size_t i = 0; i < tab_.size(); ++i)
    if (basis_[i] < vars_) x[basis_[i]] = tab_[i][cols_];
  return x;
}

}  // namespace coalesce
