#include "coalesce/kset.hpp"

#include <algorithm>

#include "coalesce/block_structure.hpp"
#include "coalesce/error.hpp"
#include "coalesce/parallel.hpp"

namespace coalesce {

const char* to_string(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::Exhaustive: return "exhaustive";
    case ExclusionReason::Aperiodicity: return "aperiodicity";
    case ExclusionReason::DoubleStochasticity: return "double-stochasticity";
    case ExclusionReason::SinglePairCriterion: return "single-pair-criterion";
  }
  return "unknown";
}

std::vector<std::size_t> KSetReport::member_values() const {
  std::vector<std::size_t> out;
  for (const auto& [k, w] : members) out.push_back(k);
  return out;
}

Support allowed_functions(const StochasticMatrix& p, std::size_t cap) {
  const std::size_t n = p.size();
  std::vector<std::vector<State>> choices(n);
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (p.positive(i, j)) choices[i].push_back(static_cast<State>(j));
    if (count > cap / choices[i].size()) {
      throw Error(ErrorKind::SupportTooLarge, "more than " + std::to_string(cap) + " allowed functions");
    }
    count *= choices[i].size();
  }
  std::vector<MapFunction> out;
  out.reserve(count);
  std::vector<std::size_t> idx(n, 0);
  std::vector<State> image(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) image[i] = choices[i][idx[i]];
    out.emplace_back(image);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < choices[i].size()) break;
      idx[i] = 0;
      if (i == 0) return Support(std::move(out));
    }
  }
}

namespace {

struct Evaluation {
  bool passes_filter = false;
  std::optional<FeasibleSupport> feasible;
};

Evaluation evaluate(const StochasticMatrix& p, const Support& allowed, const std::vector<std::size_t>& subset) {
  std::vector<MapFunction> fs;
  fs.reserve(subset.size());
  for (std::size_t k : subset) fs.push_back(allowed[k]);
  Support support(std::move(fs));
  Evaluation e;
  e.passes_filter = necessary_support_filter(p, support);
  if (!e.passes_filter) return e;
  auto weights = feasible_weights(p, support);
  if (!weights) return e;
  const std::size_t k = coalescence_number(support);
  PairSet pairs = coalescing_pairs(support);
  e.feasible = FeasibleSupport{std::move(support), std::move(*weights), k, std::move(pairs)};
  return e;
}

// Advances a lexicographic s-subset of {0..m-1}; false after the last one.
bool next_combination(std::vector<std::size_t>& c, std::size_t m) {
  const std::size_t s = c.size();
  for (std::size_t i = s; i-- > 0;) {
    if (c[i] < m - s + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

KSetReport k_set_exact(const StochasticMatrix& p, std::uint64_t cap, const FeasibleSupportVisitor& visit,
                       unsigned threads) {
  const std::size_t n = p.size();
  std::optional<Support> maybe_allowed;
  try {
    maybe_allowed = allowed_functions(p, 62);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SupportTooLarge) throw;
  }
  const std::size_t m = maybe_allowed ? maybe_allowed->size() : 63;
  if (m >= 63 || (std::uint64_t{1} << m) - 1 > cap) {
    throw Error(ErrorKind::BudgetExceeded, "2^" + std::to_string(m) + " - 1 candidate supports exceed the cap of " +
                                               std::to_string(cap));
  }
  const Support& allowed = *maybe_allowed;
  if (threads == 0) threads = default_thread_count();
  KSetReport report;
  report.n = n;
  report.exact = true;

  // k is antitone in the support, so no subset goes below k(allowed).
  const std::size_t k_floor = coalescence_number(allowed);
  auto all_found = [&] {
    for (std::size_t k = k_floor; k <= n; ++k)
      if (!report.members.contains(k)) return false;
    return true;
  };

  constexpr std::size_t kBatch = 2048;
  bool stop = false;
  for (std::size_t s = 1; s <= m && !stop; ++s) {
    std::vector<std::size_t> combo(s);
    for (std::size_t i = 0; i < s; ++i) combo[i] = i;
    bool more = true;
    while (more && !stop) {
      std::vector<std::vector<std::size_t>> batch;
      while (more && batch.size() < kBatch) {
        batch.push_back(combo);
        more = next_combination(combo, m);
      }
      std::vector<Evaluation> results(batch.size());
      parallel_chunks(batch.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
        for (std::size_t b = begin; b < end; ++b) results[b] = evaluate(p, allowed, batch[b]);
      });
      for (auto& e : results) {
        ++report.supports_enumerated;
        if (e.passes_filter) ++report.supports_passing_filter;
        if (!e.feasible) continue;
        ++report.feasible_supports;
        if (visit) visit(*e.feasible);
        if (!report.members.contains(e.feasible->k)) {
          report.members.emplace(e.feasible->k, KWitness{GrandCoupling(e.feasible->weights), e.feasible->support,
                                                         true, "exhaustive support enumeration"});
        }
        if (!visit && all_found()) {
          stop = true;
          break;
        }
      }
    }
  }
  for (std::size_t k = 1; k <= n; ++k)
    if (!report.members.contains(k)) report.exclusions.emplace(k, ExclusionReason::Exhaustive);
  return report;
}

bool single_pair_condition(const StochasticMatrix& p, std::size_t a, std::size_t b) {
  const std::size_t n = p.size();
  Rational out_a = 0, out_b = 0, in = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == a || j == b) continue;
    out_a += p(a, j);
    out_b += p(b, j);
    in += p(j, a) + p(j, b);
  }
  return out_a == out_b && out_b == in;
}

bool single_pair_excluded(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (single_pair_condition(p, a, b)) return false;
  return true;
}

namespace {

// k of a witness by expansion, or nullopt when it does not fit.
std::optional<std::size_t> verified_k(const GrandCoupling& mu, std::size_t cap) {
  if (support_size(mu, cap) > cap) return std::nullopt;
  try {
    return coalescence_number(expand_support(mu, cap));
  } catch (const Error& e) {
    if (is_budget_error(e.kind())) return std::nullopt;
    throw;
  }
}

}  // namespace

KSetReport k_set_certificates(const StochasticMatrix& p, const CertificateOptions& options) {
  const std::size_t n = p.size();
  KSetReport report;
  report.n = n;
  const bool irreducible = is_irreducible(p);

  if (irreducible) {
    if (period(p) == 1) {
      GrandCoupling witness = doeblin_coupling(p, DoeblinMode::Lazy);
      const auto k = verified_k(witness, options.verify_cap);
      report.members.emplace(1, KWitness{std::move(witness), std::nullopt, k == std::optional<std::size_t>(1),
                                         "product coupling of an aperiodic chain"});
    } else {
      report.exclusions.emplace(1, ExclusionReason::Aperiodicity);
    }
  }
  if (is_doubly_stochastic(p)) {
    GrandCoupling witness = permutation_coupling(p);
    const Support support = witness.explicit_form().support();
    const bool ok = is_consistent(witness, p) && coalescence_number(support) == n;
    report.members.emplace(n, KWitness{std::move(witness), support, ok, "Birkhoff permutation coupling"});
  } else if (irreducible) {
    report.exclusions.emplace(n, ExclusionReason::DoubleStochasticity);
  }
  if (irreducible && n >= 3 && single_pair_excluded(p)) {
    report.exclusions.emplace(n - 1, ExclusionReason::SinglePairCriterion);
  }
  if (n <= options.max_partition_states) {
    for (const Partition& part : all_partitions(n)) {
      const std::size_t l = part.block_count();
      if (report.members.contains(l) || report.exclusions.contains(l)) continue;
      if (!check_block_conditions(p, part)) continue;
      GrandCoupling witness = construct_block_measure(p, part);
      if (!is_consistent(witness, p)) continue;
      if (verified_k(witness, options.verify_cap) != std::optional<std::size_t>(l)) continue;
      report.members.emplace(l, KWitness{std::move(witness), std::nullopt, true,
                                         "block measure on " + part.to_string()});
    }
  }
  return report;
}

KSetReport k_set(const StochasticMatrix& p, std::uint64_t cap) {
  try {
    return k_set_exact(p, cap);
  } catch (const Error& e) {
    if (!is_budget_error(e.kind())) throw;
  }
  return k_set_certificates(p);
}

NonBlockSearchReport search_non_block(const StochasticMatrix& p, std::uint64_t trials, const RngStream& stream,
                                      std::size_t allowed_cap) {
  const Support allowed = allowed_functions(p, allowed_cap);
  const std::size_t n = p.size();
  const std::size_t m = allowed.size();
  const std::size_t lo = std::min(n, m);
  const std::size_t hi = std::min(2 * n * n, m);
  NonBlockSearchReport report;
  std::vector<std::size_t> order(m);
  for (std::uint64_t t = 0; t < trials && !report.non_block; ++t) {
    ++report.trials;
    CounterRng rng = stream.derive(t).substream(0);
    const std::size_t size = lo + rng.below(hi - lo + 1);
    for (std::size_t k = 0; k < m; ++k) order[k] = k;
    std::vector<MapFunction> chosen;
    for (std::size_t k = 0; k < size; ++k) {
      std::swap(order[k], order[k + rng.below(m - k)]);
      chosen.push_back(allowed[order[k]]);
    }
    const Support s(std::move(chosen));
    if (!necessary_support_filter(p, s)) continue;
    auto w = feasible_weights(p, s);
    if (!w) continue;
    ++report.feasible;
    const auto parts = limiting_partitions(s);
    if (parts.size() != 1 || !is_block_measure(*w, parts.front())) report.non_block = std::move(w);
  }
  return report;
}

KSetReport divisor_members(std::size_t n, std::size_t verify_cap) {
  KSetReport report;
  report.n = n;
  const StochasticMatrix pn = StochasticMatrix::uniform(n);
  for (std::size_t l = 1; l <= n; ++l) {
    if (n % l != 0) continue;
    GrandCoupling witness = uniform_divisor_coupling(n, l);
    if (!is_consistent(witness, pn)) {
      throw Error(ErrorKind::MalformedInput, "divisor coupling for l = " + std::to_string(l) + " is inconsistent");
    }
    const auto k = verified_k(witness, verify_cap);
    if (k && *k != l) {
      throw Error(ErrorKind::MalformedInput, "divisor coupling for l = " + std::to_string(l) + " has k = " +
                                                 std::to_string(*k));
    }
    report.members.emplace(l, KWitness{std::move(witness), std::nullopt, k.has_value(),
                                       "uniform block permutation on " + std::to_string(l) + " blocks"});
  }
  return report;
}

}  // namespace coalesce
