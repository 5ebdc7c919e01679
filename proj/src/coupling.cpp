#include "coalesce/coupling.hpp"

#include <algorithm>
#include <numeric>

#include "coalesce/block_structure.hpp"
#include "coalesce/error.hpp"

namespace coalesce {

Support::Support(std::vector<MapFunction> functions) : functions_(std::move(functions)) {
  if (functions_.empty()) throw Error(ErrorKind::MalformedInput, "support is empty");
  for (const auto& f : functions_) {
    if (f.size() != functions_.front().size()) {
      throw Error(ErrorKind::DimensionMismatch, "support mixes state counts");
    }
  }
  std::sort(functions_.begin(), functions_.end());
  functions_.erase(std::unique(functions_.begin(), functions_.end()), functions_.end());
}

bool Support::contains(const MapFunction& f) const {
  return std::binary_search(functions_.begin(), functions_.end(), f);
}

ExplicitCoupling::ExplicitCoupling(std::vector<WeightedFunction> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(ErrorKind::MalformedInput, "coupling has no terms");
  Rational total = 0;
  for (auto& t : terms_) {
    t.weight.canonicalize();
    if (t.function.size() != terms_.front().function.size()) {
      throw Error(ErrorKind::DimensionMismatch, "coupling mixes state counts");
    }
    if (sgn(t.weight) <= 0) {
      throw Error(ErrorKind::MalformedInput,
                  "non-positive weight " + t.weight.get_str() + " on " + t.function.to_string());
    }
    total += t.weight;
  }
  if (total != 1) throw Error(ErrorKind::MalformedInput, "weights sum to " + total.get_str());
  std::sort(terms_.begin(), terms_.end(),
            [](const WeightedFunction& a, const WeightedFunction& b) { return a.function < b.function; });
  for (std::size_t k = 1; k < terms_.size(); ++k) {
    if (terms_[k].function == terms_[k - 1].function) {
      throw Error(ErrorKind::MalformedInput, "duplicate function " + terms_[k].function.to_string());
    }
  }
}

ExplicitCoupling ExplicitCoupling::dirac(const MapFunction& f) {
  return ExplicitCoupling({{f, Rational(1)}});
}

Support ExplicitCoupling::support() const {
  std::vector<MapFunction> fs;
  fs.reserve(terms_.size());
  for (const auto& t : terms_) fs.push_back(t.function);
  return Support(std::move(fs));
}

namespace {

bool is_permutation_of(const std::vector<std::size_t>& perm, std::size_t l) {
  if (perm.size() != l) return false;
  std::vector<bool> hit(l, false);
  for (std::size_t v : perm) {
    if (v >= l || hit[v]) return false;
    hit[v] = true;
  }
  return true;
}

std::size_t saturating_mul(std::size_t a, std::size_t b, std::size_t limit) {
  if (a == 0 || b == 0) return 0;
  if (a > limit / b) return limit + 1;
  return std::min(a * b, limit + 1);
}

}  // namespace

BlockPermutationLaw::BlockPermutationLaw(std::vector<WeightedPermutation> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(ErrorKind::MalformedInput, "block permutation law has no terms");
  blocks_ = terms_.front().permutation.size();
  Rational total = 0;
  for (auto& t : terms_) {
    t.weight.canonicalize();
    if (!is_permutation_of(t.permutation, blocks_)) {
      throw Error(ErrorKind::MalformedInput, "block law entry is not a permutation of the blocks");
    }
    if (sgn(t.weight) <= 0) throw Error(ErrorKind::MalformedInput, "non-positive block permutation weight");
    total += t.weight;
  }
  if (total != 1) throw Error(ErrorKind::MalformedInput, "block permutation weights sum to " + total.get_str());
  std::sort(terms_.begin(), terms_.end(),
            [](const auto& a, const auto& b) { return a.permutation < b.permutation; });
  for (std::size_t k = 1; k < terms_.size(); ++k) {
    if (terms_[k].permutation == terms_[k - 1].permutation) {
      throw Error(ErrorKind::MalformedInput, "duplicate block permutation");
    }
  }
}

BlockPermutationLaw BlockPermutationLaw::uniform(std::size_t blocks) {
  if (blocks == 0) throw Error(ErrorKind::MalformedInput, "zero blocks");
  BlockPermutationLaw law;
  law.blocks_ = blocks;
  law.uniform_ = true;
  return law;
}

Rational BlockPermutationLaw::marginal(std::size_t r, std::size_t s) const {
  if (uniform_) return Rational(1, static_cast<unsigned long>(blocks_));
  Rational sum = 0;
  for (const auto& t : terms_)
    if (t.permutation[r] == s) sum += t.weight;
  return sum;
}

std::vector<WeightedPermutation> BlockPermutationLaw::enumerate(std::size_t cap) const {
  if (!uniform_) return terms_;
  std::size_t count = 1;
  for (std::size_t k = 2; k <= blocks_; ++k) count = saturating_mul(count, k, cap);
  if (count > cap) throw Error(ErrorKind::SupportTooLarge, "more than " + std::to_string(cap) + " block permutations");
  std::vector<std::size_t> perm(blocks_);
  std::iota(perm.begin(), perm.end(), 0);
  const Rational w(1, static_cast<unsigned long>(count));
  std::vector<WeightedPermutation> out;
  out.reserve(count);
  do {
    out.push_back({perm, w});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

BlockCoupling::BlockCoupling(Partition partition, BlockPermutationLaw law,
                             std::vector<std::vector<Rational>> within)
    : partition_(std::move(partition)), law_(std::move(law)), within_(std::move(within)) {
  const std::size_t n = partition_.state_count();
  const std::size_t l = partition_.block_count();
  if (law_.block_count() != l) {
    throw Error(ErrorKind::DimensionMismatch, "block law acts on " + std::to_string(law_.block_count()) +
                                                  " blocks, partition has " + std::to_string(l));
  }
  if (within_.size() != n) throw Error(ErrorKind::DimensionMismatch, "within needs one row per state");
  for (auto& row : within_) {
    if (row.size() != n) throw Error(ErrorKind::DimensionMismatch, "within row length");
    for (auto& v : row)
      if (v.canonicalize(), sgn(v) < 0) throw Error(ErrorKind::MalformedInput, "negative within weight");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = partition_.block_of(i);
    for (std::size_t s = 0; s < l; ++s) {
      if (sgn(law_.marginal(r, s)) > 0 && sgn(within_mass(i, s)) == 0) {
        throw Error(ErrorKind::MalformedInput, "state " + std::to_string(i + 1) +
                                                   " has no within-mass on block " + std::to_string(s + 1));
      }
    }
  }
}

Rational BlockCoupling::within_mass(std::size_t i, std::size_t s) const {
  Rational sum = 0;
  for (std::size_t j : partition_.block(s)) sum += within_[i][j];
  return sum;
}

std::size_t GrandCoupling::state_count() const {
  return is_explicit() ? explicit_form().state_count() : block_form().state_count();
}

StochasticMatrix induced_matrix(const GrandCoupling& mu) {
  const std::size_t n = mu.state_count();
  std::vector<std::vector<Rational>> q(n, std::vector<Rational>(n, 0));
  if (mu.is_explicit()) {
    for (const auto& t : mu.explicit_form().terms())
      for (std::size_t i = 0; i < n; ++i) q[i][t.function(i)] += t.weight;
    return StochasticMatrix(q);
  }
  const BlockCoupling& b = mu.block_form();
  const Partition& part = b.partition();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = part.block_of(i);
    for (std::size_t s = 0; s < part.block_count(); ++s) {
      const Rational rho = b.law().marginal(r, s);
      if (sgn(rho) == 0) continue;
      const Rational scale = rho / b.within_mass(i, s);
      for (std::size_t j : part.block(s)) q[i][j] = scale * b.within()[i][j];
    }
  }
  return StochasticMatrix(q);
}

bool is_consistent(const GrandCoupling& mu, const StochasticMatrix& p) {
  if (mu.state_count() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "coupling on " + std::to_string(mu.state_count()) +
                                                  " states, matrix on " + std::to_string(p.size()));
  }
  return induced_matrix(mu) == p;
}

GrandCoupling doeblin_coupling(const StochasticMatrix& p, DoeblinMode mode, std::size_t cap) {
  const std::size_t n = p.size();
  if (mode == DoeblinMode::Lazy) {
    return BlockCoupling(Partition::whole(n), BlockPermutationLaw::uniform(1), p.rows());
  }
  std::vector<std::vector<State>> choices(n);
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (p.positive(i, j)) choices[i].push_back(static_cast<State>(j));
    count = saturating_mul(count, choices[i].size(), cap);
  }
  if (count > cap) {
    throw Error(ErrorKind::SupportTooLarge, "product coupling has more than " + std::to_string(cap) + " functions");
  }
  std::vector<WeightedFunction> terms;
  terms.reserve(count);
  std::vector<std::size_t> idx(n, 0);
  std::vector<State> image(n);
  while (true) {
    Rational w = 1;
    for (std::size_t i = 0; i < n; ++i) {
      image[i] = choices[i][idx[i]];
      w *= p(i, image[i]);
    }
    terms.push_back({MapFunction(image), w});
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < choices[i].size()) break;
      idx[i] = 0;
      if (i == 0) return ExplicitCoupling(std::move(terms));
    }
  }
}

GrandCoupling permutation_coupling(const StochasticMatrix& p) {
  const BirkhoffDecomposition d = birkhoff_decomposition(p);
  std::vector<WeightedFunction> terms;
  for (const auto& t : d.terms) terms.push_back({t.permutation, t.weight});
  return ExplicitCoupling(std::move(terms));
}

std::size_t support_size(const GrandCoupling& mu, std::size_t cap) {
  if (mu.is_explicit()) return std::min(mu.explicit_form().terms().size(), cap + 1);
  const BlockCoupling& b = mu.block_form();
  const Partition& part = b.partition();
  const std::size_t n = part.state_count();
  // Per block-permutation count of compatible functions; uniform laws make it
  // the same for every block image, so multiply by l!.
  auto count_for = [&](const std::vector<std::size_t>& perm) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t targets = 0;
      for (std::size_t j : part.block(perm[part.block_of(i)]))
        if (sgn(b.within()[i][j]) > 0) ++targets;
      c = saturating_mul(c, targets, cap);
    }
    return c;
  };
  std::size_t total = 0;
  if (b.law().is_uniform()) {
    std::size_t perm_count = 1;
    for (std::size_t k = 2; k <= part.block_count(); ++k) perm_count = saturating_mul(perm_count, k, cap);
    if (perm_count > cap) return cap + 1;
    const auto perms = b.law().enumerate(cap);
    for (const auto& t : perms) total = std::min(total + count_for(t.permutation), cap + 1);
  } else {
    for (const auto& t : b.law().terms()) total = std::min(total + count_for(t.permutation), cap + 1);
  }
  return total;
}

ExplicitCoupling expand(const GrandCoupling& mu, std::size_t cap) {
  if (mu.is_explicit()) return mu.explicit_form();
  const std::size_t size = support_size(mu, cap);
  if (size > cap) {
    throw Error(ErrorKind::SupportTooLarge, "coupling support exceeds " + std::to_string(cap) + " functions");
  }
  const BlockCoupling& b = mu.block_form();
  const Partition& part = b.partition();
  const std::size_t n = part.state_count();
  std::vector<WeightedFunction> terms;
  terms.reserve(size);
  for (const auto& t : b.law().enumerate(cap)) {
    std::vector<std::vector<State>> choices(n);
    std::vector<std::vector<Rational>> probs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s = t.permutation[part.block_of(i)];
      const Rational mass = b.within_mass(i, s);
      for (std::size_t j : part.block(s)) {
        if (sgn(b.within()[i][j]) > 0) {
          choices[i].push_back(static_cast<State>(j));
          probs[i].push_back(b.within()[i][j] / mass);
        }
      }
    }
    std::vector<std::size_t> idx(n, 0);
    std::vector<State> image(n);
    bool done = false;
    while (!done) {
      Rational w = t.weight;
      for (std::size_t i = 0; i < n; ++i) {
        image[i] = choices[i][idx[i]];
        w *= probs[i][idx[i]];
      }
      terms.push_back({MapFunction(image), w});
      done = true;
      for (std::size_t i = n; i-- > 0;) {
        if (++idx[i] < choices[i].size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
    }
  }
  return ExplicitCoupling(std::move(terms));
}

Support expand_support(const GrandCoupling& mu, std::size_t cap) { return expand(mu, cap).support(); }

}  // namespace coalesce
