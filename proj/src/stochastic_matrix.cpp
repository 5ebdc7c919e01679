#include "coalesce/stochastic_matrix.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <sstream>

#include "coalesce/error.hpp"

namespace coalesce {

StochasticMatrix::StochasticMatrix(const std::vector<std::vector<Rational>>& rows) : n_(rows.size()) {
  if (n_ == 0) throw Error(ErrorKind::NonSquare, "matrix has no rows");
  entries_.reserve(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (rows[i].size() != n_) {
      throw Error(ErrorKind::NonSquare, "row " + std::to_string(i + 1) + " has " +
                                            std::to_string(rows[i].size()) + " entries, expected " +
                                            std::to_string(n_));
    }
    Rational sum = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      Rational v = rows[i][j];
      v.canonicalize();
      if (sgn(v) < 0 || v > 1) {
        throw Error(ErrorKind::EntryOutOfRange, "entry (" + std::to_string(i + 1) + "," +
                                                    std::to_string(j + 1) + ") = " + v.get_str());
      }
      sum += v;
      entries_.push_back(v);
    }
    if (sum != 1) throw RowSumError(i, sum.get_str());
  }
}

StochasticMatrix StochasticMatrix::identity(std::size_t n) {
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1;
  return StochasticMatrix(rows);
}

StochasticMatrix StochasticMatrix::uniform(std::size_t n) {
  const Rational v(1, static_cast<unsigned long>(n));
  return StochasticMatrix(std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, v)));
}

StochasticMatrix StochasticMatrix::lazy_cycle(std::size_t n) {
  if (n == 1) return identity(1);
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    rows[i][i] = Rational(1, 2);
    rows[i][(i + 1) % n] = Rational(1, 2);
  }
  return StochasticMatrix(rows);
}

std::vector<std::vector<Rational>> StochasticMatrix::rows() const {
  std::vector<std::vector<Rational>> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

StochasticMatrix StochasticMatrix::relabeled(std::span<const std::size_t> perm) const {
  if (perm.size() != n_) throw Error(ErrorKind::DimensionMismatch, "relabeling size");
  std::vector<std::vector<Rational>> out(n_, std::vector<Rational>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(perm[i], perm[j]);
  return StochasticMatrix(out);
}

std::string StochasticMatrix::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (j) os << ' ';
      os << (*this)(i, j).get_str();
    }
    os << '\n';
  }
  return os.str();
}

StochasticMatrix parse_matrix(std::string_view text) {
  std::vector<std::vector<Rational>> rows;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<Rational> row;
    std::string token;
    while (tokens >> token) row.push_back(parse_rational(token));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return StochasticMatrix(rows);
}

namespace {

std::vector<bool> reachable(const StochasticMatrix& p, std::size_t start, bool reverse) {
  const std::size_t n = p.size();
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  seen[start] = true;
  frontier.push(start);
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < n; ++v) {
      const bool edge = reverse ? p.positive(v, u) : p.positive(u, v);
      if (edge && !seen[v]) {
        seen[v] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

bool all_true(const std::vector<bool>& v) {
  return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

}  // namespace

bool is_irreducible(const StochasticMatrix& p) {
  return all_true(reachable(p, 0, false)) && all_true(reachable(p, 0, true));
}

std::size_t period(const StochasticMatrix& p) {
  if (!is_irreducible(p)) throw Error(ErrorKind::NotIrreducible, "period needs an irreducible matrix");
  const std::size_t n = p.size();
  // BFS levels from state 0; every edge u->v closes a walk of length
  // level[u] + 1 - level[v] modulo the period.
  std::vector<long> level(n, -1);
  std::queue<std::size_t> frontier;
  level[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (p.positive(u, v) && level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      }
    }
  }
  long g = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (p.positive(u, v)) g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
  return static_cast<std::size_t>(g);
}

bool is_doubly_stochastic(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  for (std::size_t j = 0; j < n; ++j) {
    Rational sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += p(i, j);
    if (sum != 1) return false;
  }
  return true;
}

ProbabilityVector::ProbabilityVector(std::vector<Rational> entries) : entries_(std::move(entries)) {
  Rational sum = 0;
  for (auto& v : entries_) {
    v.canonicalize();
    if (sgn(v) < 0) throw Error(ErrorKind::EntryOutOfRange, "negative probability " + v.get_str());
    sum += v;
  }
  if (sum != 1) throw Error(ErrorKind::MalformedInput, "probability vector sums to " + sum.get_str());
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  return ProbabilityVector(std::vector<Rational>(n, Rational(1, static_cast<unsigned long>(n))));
}

ProbabilityVector invariant_distribution(const StochasticMatrix& p) {
  if (!is_irreducible(p)) {
    throw Error(ErrorKind::NotIrreducible, "invariant distribution is not unique");
  }
  const std::size_t n = p.size();
  // Rows 0..n-2 of (P^T - I) x = 0, last row replaced by sum(x) = 1.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1, 0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = p(j, i);
    a[i][i] -= 1;
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1;
  a[n - 1][n] = 1;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == n) throw Error(ErrorKind::NotIrreducible, "singular balance system");
    std::swap(a[pivot], a[col]);
    const Rational inv = 1 / a[col][col];
    for (auto& v : a[col]) v *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const Rational factor = a[r][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<Rational> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n];
  return ProbabilityVector(std::move(pi));
}

}  // namespace coalesce
