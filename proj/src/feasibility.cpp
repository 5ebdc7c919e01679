#include "coalesce/feasibility.hpp"

#include "coalesce/error.hpp"
#include "coalesce/simplex.hpp"

namespace coalesce {

bool necessary_support_filter(const StochasticMatrix& p, const Support& support) {
  const std::size_t n = p.size();
  if (support.state_count() != n) throw Error(ErrorKind::DimensionMismatch, "support and matrix sizes differ");
  std::vector<bool> covered(n * n, false);
  for (const auto& f : support.functions()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!p.positive(i, f(i))) return false;
      covered[i * n + f(i)] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p.positive(i, j) && !covered[i * n + j]) return false;
  return true;
}

std::optional<FeasibilityWitness> feasible_weights(const StochasticMatrix& p, const Support& support) {
  if (!necessary_support_filter(p, support)) return std::nullopt;
  const std::size_t n = p.size();
  const std::size_t m = support.size();

  // One equality per positive entry; zero entries hold automatically since
  // every f only uses positive entries. Row sums make sum(alpha) = 1 implied.
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!p.positive(i, j)) continue;
      std::vector<Rational> row(m, 0);
      for (std::size_t k = 0; k < m; ++k)
        if (support[k](i) == j) row[k] = 1;
      a.push_back(std::move(row));
      b.push_back(p(i, j));
    }
  }
  ExactSimplex lp(a, b);
  if (!lp.feasible()) return std::nullopt;

  // Coordinates already positive in a collected vertex need no LP of their
  // own; the average of the collected vertices is positive everywhere.
  std::vector<std::vector<Rational>> vertices;
  std::vector<bool> positive(m, false);
  auto collect = [&](std::vector<Rational> x) {
    for (std::size_t k = 0; k < m; ++k)
      if (sgn(x[k]) > 0) positive[k] = true;
    vertices.push_back(std::move(x));
  };
  collect(lp.solution());
  for (std::size_t k = 0; k < m; ++k) {
    if (positive[k]) continue;
    std::vector<Rational> objective(m, 0);
    objective[k] = 1;
    const auto best = lp.maximize(objective);
    if (!best || sgn(*best) <= 0) return std::nullopt;
    collect(lp.solution());
  }

  std::vector<WeightedFunction> terms;
  terms.reserve(m);
  const Rational count(static_cast<long>(vertices.size()));
  for (std::size_t k = 0; k < m; ++k) {
    Rational sum = 0;
    for (const auto& v : vertices) sum += v[k];
    terms.push_back({support[k], sum / count});
  }
  return ExplicitCoupling(std::move(terms));
}

}  // namespace coalesce
