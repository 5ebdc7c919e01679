#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coalesce/coupling.hpp"
#include "coalesce/rng.hpp"
#include "coalesce/stochastic_matrix.hpp"

namespace coalesce {

inline constexpr std::uint64_t kDefaultTMax = std::uint64_t{1} << 20;

/// Exact draws from a finite distribution with rational weights: weights are
/// scaled to integers over their common denominator and an integer is drawn
/// uniformly below the total.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const Rational> weights);

  std::size_t draw(CounterRng& rng) const;
  std::size_t size() const noexcept { return size_; }

 private:
  std::size_t size_ = 0;
  bool small_ = true;
  std::vector<std::uint64_t> cumulative64_;
  std::vector<mpz_class> cumulative_;
};

/// Precomputed sampling tables for a coupling. Explicit forms draw a term by
/// inverse CDF; block forms draw the block permutation, then each state's
/// target inside its image block.
class CouplingSampler {
 public:
  explicit CouplingSampler(const GrandCoupling& mu);

  std::size_t state_count() const noexcept { return n_; }
  MapFunction draw(CounterRng& rng) const;
  /// The function F_index: always the same for the same stream and index.
  MapFunction at(const RngStream& stream, std::uint64_t index) const;

 private:
  struct Targets {
    std::vector<State> states;
    std::optional<DiscreteSampler> sampler;
  };

  std::size_t n_ = 0;
  // Explicit form.
  std::vector<MapFunction> functions_;
  std::optional<DiscreteSampler> function_sampler_;
  // Block form.
  bool block_ = false;
  std::vector<std::size_t> block_of_;
  std::size_t blocks_ = 0;
  bool uniform_law_ = false;
  std::vector<std::vector<std::size_t>> perms_;
  std::optional<DiscreteSampler> perm_sampler_;
  std::vector<std::vector<Targets>> targets_;  // [state][image block]
};

MapFunction sample_function(const GrandCoupling& mu, const RngStream& stream, std::uint64_t index);

/// time is empty when the composite never became constant within the cutoff.
struct CoalescenceRecord {
  std::optional<std::uint64_t> time;
  std::uint64_t cutoff = 0;
  std::optional<std::size_t> terminal_state;  // 0-based, present iff coalesced
  std::vector<std::size_t> partition_trace;   // k_t for t = 1, 2, ... when traced

  bool coalesced() const noexcept { return time.has_value(); }
};

/// Forward composites F_t ∘ ... ∘ F_1 for t = 1..t_max; stops at the first
/// constant one.
CoalescenceRecord forward_coalescence(const CouplingSampler& sampler, const RngStream& stream,
                                      std::uint64_t t_max, bool trace = false);

/// Backward composites F_1 ∘ ... ∘ F_t, unit steps; time is C exactly.
CoalescenceRecord backward_coalescence(const CouplingSampler& sampler, const RngStream& stream,
                                       std::uint64_t t_max, bool trace = false);

/// Called with (time index, function) for every function drawn.
using DrawObserver = std::function<void(std::uint64_t, const MapFunction&)>;

/// Propp-Wilson with horizons 1, 2, 4, ... (the last one clipped to t_max).
/// Extending horizon t to t' composes G_t with F_{t+1} ∘ ... ∘ F_{t'}, so
/// F_s is the same function in every round. On success time is the horizon
/// that first gave a constant map and terminal_state its value.
CoalescenceRecord cftp_run(const CouplingSampler& sampler, const RngStream& stream, std::uint64_t t_max,
                           const DrawObserver& observer = {});

struct SamplerOptions {
  std::uint64_t t_max = kDefaultTMax;
  /// Largest support expanded to decide k(mu) up front.
  std::size_t support_cap = std::size_t{1} << 16;
  std::size_t closure_cap = 1'000'000;
};

/// CFTP with an up-front guard: when the induced chain is periodic, or the
/// support has k(mu) > 1, coalescence is impossible and sample() returns
/// DidNotCoalesce without simulating.
class PerfectSampler {
 public:
  explicit PerfectSampler(const GrandCoupling& mu, SamplerOptions options = {});

  CoalescenceRecord sample(const RngStream& stream) const;

  bool can_coalesce() const noexcept { return can_coalesce_; }
  const std::string& guard_reason() const noexcept { return guard_reason_; }
  std::optional<std::size_t> known_coalescence_number() const noexcept { return known_k_; }
  const CouplingSampler& sampler() const noexcept { return sampler_; }
  const SamplerOptions& options() const noexcept { return options_; }

 private:
  CouplingSampler sampler_;
  SamplerOptions options_;
  bool can_coalesce_ = true;
  std::string guard_reason_;
  std::optional<std::size_t> known_k_;
};

CoalescenceRecord cftp_sample(const GrandCoupling& mu, const RngStream& stream, std::uint64_t t_max = kDefaultTMax);

struct SampleHistogram {
  std::vector<std::uint64_t> counts;  // per state
  std::uint64_t did_not_coalesce = 0;
  std::uint64_t samples = 0;
};

/// Sample s uses stream.derive(s); counts are independent of thread count.
SampleHistogram cftp_histogram(const PerfectSampler& sampler, const RngStream& stream, std::uint64_t samples,
                               unsigned threads = 0);

/// Half the L1 distance between the empirical law of coalesced samples and pi.
double total_variation(const SampleHistogram& histogram, const ProbabilityVector& pi);

struct EquidistributionReport {
  std::uint64_t runs = 0;
  std::uint64_t t_max = 0;
  std::map<std::uint64_t, std::uint64_t> backward_times;  // C value -> count
  std::map<std::uint64_t, std::uint64_t> forward_times;   // T value -> count
  std::uint64_t backward_censored = 0;
  std::uint64_t forward_censored = 0;
  double max_cdf_gap = 0;
  double threshold = 0;
  bool pass = false;
};

/// Simulates C and T independently `runs` times each (run r uses
/// stream.derive(2r) backward and stream.derive(2r+1) forward) and compares
/// their empirical CDFs on 1..t_max.
EquidistributionReport equidistribution_check(const GrandCoupling& mu, std::uint64_t runs, std::uint64_t t_max,
                                              const RngStream& stream, double threshold = 0.02,
                                              unsigned threads = 0);

}  // namespace coalesce
