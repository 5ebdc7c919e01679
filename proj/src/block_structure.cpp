#include "coalesce/block_structure.hpp"

#include "coalesce/error.hpp"
#include "coalesce/matching.hpp"
#include "coalesce/semigroup.hpp"

namespace coalesce {

std::variant<BlockMatrix, LumpabilityViolation> check_lumpability(const StochasticMatrix& p,
                                                                  const Partition& partition) {
  if (partition.state_count() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "partition and matrix sizes differ");
  }
  const std::size_t l = partition.block_count();
  std::vector<std::vector<Rational>> lambda(l, std::vector<Rational>(l, 0));
  for (std::size_t r = 0; r < l; ++r) {
    const auto& block = partition.block(r);
    for (std::size_t s = 0; s < l; ++s) {
      Rational first;
      for (std::size_t k = 0; k < block.size(); ++k) {
        Rational mass = 0;
        for (std::size_t j : partition.block(s)) mass += p(block[k], j);
        if (k == 0) {
          first = mass;
        } else if (mass != first) {
          return LumpabilityViolation{r, s, block.front(), block[k]};
        }
      }
      lambda[r][s] = first;
    }
  }
  return StochasticMatrix(lambda);
}

bool check_block_conditions(const StochasticMatrix& p, const Partition& partition) {
  const auto lumped = check_lumpability(p, partition);
  const auto* lambda = std::get_if<BlockMatrix>(&lumped);
  return lambda != nullptr && is_doubly_stochastic(*lambda);
}

BirkhoffDecomposition birkhoff_decomposition(const StochasticMatrix& d) {
  if (!is_doubly_stochastic(d)) throw Error(ErrorKind::NotDoublyStochastic, "Birkhoff decomposition input");
  const std::size_t n = d.size();
  std::vector<std::vector<Rational>> residual = d.rows();
  BirkhoffDecomposition out;
  while (true) {
    BipartiteGrid allowed(n, std::vector<bool>(n, false));
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (sgn(residual[i][j]) > 0) allowed[i][j] = any = true;
    if (!any) break;
    const auto matching = least_perfect_matching(allowed);
    // A positive multiple of a doubly stochastic matrix always has one (Hall).
    if (!matching) throw Error(ErrorKind::NotDoublyStochastic, "residual lost its perfect matching");
    Rational weight = residual[0][(*matching)[0]];
    for (std::size_t i = 1; i < n; ++i) weight = std::min(weight, residual[i][(*matching)[i]]);
    std::vector<State> image(n);
    for (std::size_t i = 0; i < n; ++i) {
      residual[i][(*matching)[i]] -= weight;
      image[i] = static_cast<State>((*matching)[i]);
    }
    out.terms.push_back({MapFunction(std::move(image)), weight});
  }
  return out;
}

GrandCoupling construct_block_measure(const StochasticMatrix& p, const Partition& partition) {
  const auto lumped = check_lumpability(p, partition);
  const auto* lambda = std::get_if<BlockMatrix>(&lumped);
  if (lambda == nullptr || !is_doubly_stochastic(*lambda)) {
    throw Error(ErrorKind::BlockConditionsFail, "partition " + partition.to_string() +
                                                    (lambda ? " has a block matrix that is not doubly stochastic"
                                                            : " is not lumpable"));
  }
  std::vector<WeightedPermutation> terms;
  for (const auto& t : birkhoff_decomposition(*lambda).terms) {
    std::vector<std::size_t> perm(t.permutation.image().begin(), t.permutation.image().end());
    terms.push_back({std::move(perm), t.weight});
  }
  return BlockCoupling(partition, BlockPermutationLaw(std::move(terms)), p.rows());
}

std::optional<std::vector<std::size_t>> block_permutation_of(const MapFunction& f, const Partition& partition) {
  const std::size_t l = partition.block_count();
  std::vector<std::size_t> image(l);
  std::vector<bool> hit(l, false);
  for (std::size_t r = 0; r < l; ++r) {
    const auto& block = partition.block(r);
    const std::size_t target = partition.block_of(f(block.front()));
    for (std::size_t i : block)
      if (partition.block_of(f(i)) != target) return std::nullopt;
    if (hit[target]) return std::nullopt;
    hit[target] = true;
    image[r] = target;
  }
  return image;
}

bool is_block_measure(const GrandCoupling& mu, const Partition& partition, std::size_t cap) {
  if (partition.state_count() != mu.state_count()) {
    throw Error(ErrorKind::DimensionMismatch, "partition and coupling sizes differ");
  }
  const Support support = expand_support(mu, cap);
  for (const auto& f : support.functions())
    if (!block_permutation_of(f, partition)) return false;
  return coalescence_number(support) == partition.block_count();
}

GrandCoupling uniform_divisor_coupling(std::size_t n, std::size_t l) {
  Partition partition = Partition::consecutive(n, l);
  const Rational v(1, static_cast<unsigned long>(n));
  return BlockCoupling(std::move(partition), BlockPermutationLaw::uniform(l),
                       std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, v)));
}

}  // namespace coalesce
