#include "coalesce/cftp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coalesce/error.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/semigroup.hpp"

namespace coalesce {

DiscreteSampler::DiscreteSampler(std::span<const Rational> weights) : size_(weights.size()) {
  mpz_class lcm = 1;
  for (const auto& w : weights) {
    if (sgn(w) < 0) throw Error(ErrorKind::MalformedInput, "negative sampling weight");
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), w.get_den_mpz_t());
  }
  mpz_class running = 0;
  cumulative_.reserve(size_);
  for (const auto& w : weights) {
    running += w.get_num() * (lcm / w.get_den());
    cumulative_.push_back(running);
  }
  if (running == 0) throw Error(ErrorKind::MalformedInput, "sampling weights are all zero");
  small_ = running.fits_ulong_p();
  if (small_) {
    for (const auto& c : cumulative_) cumulative64_.push_back(c.get_ui());
    cumulative_.clear();
  }
}

std::size_t DiscreteSampler::draw(CounterRng& rng) const {
  if (small_) {
    const std::uint64_t u = rng.below(cumulative64_.back());
    return static_cast<std::size_t>(std::upper_bound(cumulative64_.begin(), cumulative64_.end(), u) -
                                    cumulative64_.begin());
  }
  const mpz_class u = rng.below(cumulative_.back());
  return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                  cumulative_.begin());
}

CouplingSampler::CouplingSampler(const GrandCoupling& mu) : n_(mu.state_count()) {
  if (mu.is_explicit()) {
    std::vector<Rational> weights;
    for (const auto& t : mu.explicit_form().terms()) {
      functions_.push_back(t.function);
      weights.push_back(t.weight);
    }
    function_sampler_.emplace(weights);
    return;
  }
  block_ = true;
  const BlockCoupling& b = mu.block_form();
  const Partition& part = b.partition();
  blocks_ = part.block_count();
  block_of_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) block_of_[i] = part.block_of(i);
  uniform_law_ = b.law().is_uniform();
  if (!uniform_law_) {
    std::vector<Rational> weights;
    for (const auto& t : b.law().terms()) {
      perms_.push_back(t.permutation);
      weights.push_back(t.weight);
    }
    perm_sampler_.emplace(weights);
  }
  targets_.assign(n_, std::vector<Targets>(blocks_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t s = 0; s < blocks_; ++s) {
      std::vector<Rational> weights;
      Targets& t = targets_[i][s];
      for (std::size_t j : part.block(s)) {
        if (sgn(b.within()[i][j]) > 0) {
          t.states.push_back(static_cast<State>(j));
          weights.push_back(b.within()[i][j]);
        }
      }
      if (!weights.empty()) t.sampler.emplace(weights);
    }
  }
}

MapFunction CouplingSampler::draw(CounterRng& rng) const {
  if (!block_) return functions_[function_sampler_->draw(rng)];
  std::vector<std::size_t> perm;
  if (uniform_law_) {
    perm.resize(blocks_);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = blocks_; k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  } else {
    perm = perms_[perm_sampler_->draw(rng)];
  }
  std::vector<State> image(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const Targets& t = targets_[i][perm[block_of_[i]]];
    image[i] = t.states[t.sampler->draw(rng)];
  }
  return MapFunction(std::move(image));
}

MapFunction CouplingSampler::at(const RngStream& stream, std::uint64_t index) const {
  CounterRng rng = stream.substream(index);
  return draw(rng);
}

MapFunction sample_function(const GrandCoupling& mu, const RngStream& stream, std::uint64_t index) {
  return CouplingSampler(mu).at(stream, index);
}

namespace {

enum class Direction { Forward, Backward };

CoalescenceRecord unit_step_coalescence(const CouplingSampler& sampler, const RngStream& stream,
                                        std::uint64_t t_max, bool trace, Direction dir) {
  CoalescenceRecord rec;
  rec.cutoff = t_max;
  MapFunction composite = MapFunction::identity(sampler.state_count());
  for (std::uint64_t t = 1; t <= t_max; ++t) {
    const MapFunction f = sampler.at(stream, t);
    composite = dir == Direction::Forward ? compose(f, composite) : compose(composite, f);
    const std::size_t k = composite.image_size();
    if (trace) rec.partition_trace.push_back(k);
    if (k == 1) {
      rec.time = t;
      rec.terminal_state = composite(0);
      break;
    }
  }
  return rec;
}

}  // namespace

CoalescenceRecord forward_coalescence(const CouplingSampler& sampler, const RngStream& stream,
                                      std::uint64_t t_max, bool trace) {
  return unit_step_coalescence(sampler, stream, t_max, trace, Direction::Forward);
}

CoalescenceRecord backward_coalescence(const CouplingSampler& sampler, const RngStream& stream,
                                       std::uint64_t t_max, bool trace) {
  return unit_step_coalescence(sampler, stream, t_max, trace, Direction::Backward);
}

CoalescenceRecord cftp_run(const CouplingSampler& sampler, const RngStream& stream, std::uint64_t t_max,
                           const DrawObserver& observer) {
  CoalescenceRecord rec;
  rec.cutoff = t_max;
  if (t_max == 0) return rec;
  auto draw = [&](std::uint64_t s) {
    MapFunction f = sampler.at(stream, s);
    if (observer) observer(s, f);
    return f;
  };
  // backward = F_1 ∘ ... ∘ F_t for the current horizon t.
  MapFunction backward = draw(1);
  std::uint64_t t = 1;
  while (true) {
    if (backward.is_constant()) {
      rec.time = t;
      rec.terminal_state = backward(0);
      return rec;
    }
    if (t == t_max) return rec;
    const std::uint64_t next = t > t_max / 2 ? t_max : 2 * t;
    MapFunction extension = MapFunction::identity(sampler.state_count());
    for (std::uint64_t s = t + 1; s <= next; ++s) extension = compose(extension, draw(s));
    backward = compose(backward, extension);
    t = next;
  }
}

PerfectSampler::PerfectSampler(const GrandCoupling& mu, SamplerOptions options)
    : sampler_(mu), options_(options) {
  const StochasticMatrix q = induced_matrix(mu);
  if (is_irreducible(q) && period(q) > 1) {
    can_coalesce_ = false;
    guard_reason_ = "induced chain has period " + std::to_string(period(q));
    return;
  }
  if (support_size(mu, options_.support_cap) <= options_.support_cap) {
    try {
      known_k_ = coalescence_number(expand_support(mu, options_.support_cap), options_.closure_cap);
    } catch (const Error& e) {
      if (!is_budget_error(e.kind())) throw;
    }
    if (known_k_ && *known_k_ > 1) {
      can_coalesce_ = false;
      guard_reason_ = "coalescence number is " + std::to_string(*known_k_);
    }
  }
}

CoalescenceRecord PerfectSampler::sample(const RngStream& stream) const {
  if (!can_coalesce_) {
    CoalescenceRecord rec;
    rec.cutoff = options_.t_max;
    return rec;
  }
  return cftp_run(sampler_, stream, options_.t_max);
}

CoalescenceRecord cftp_sample(const GrandCoupling& mu, const RngStream& stream, std::uint64_t t_max) {
  SamplerOptions options;
  options.t_max = t_max;
  return PerfectSampler(mu, options).sample(stream);
}

SampleHistogram cftp_histogram(const PerfectSampler& sampler, const RngStream& stream, std::uint64_t samples,
                               unsigned threads) {
  const std::size_t n = sampler.sampler().state_count();
  if (threads == 0) threads = default_thread_count();
  std::vector<SampleHistogram> partial(threads);
  parallel_chunks(samples, threads, [&](std::size_t begin, std::size_t end, unsigned w) {
    SampleHistogram& h = partial[w];
    h.counts.assign(n, 0);
    for (std::size_t s = begin; s < end; ++s) {
      const CoalescenceRecord rec = sampler.sample(stream.derive(s));
      if (rec.terminal_state) {
        ++h.counts[*rec.terminal_state];
      } else {
        ++h.did_not_coalesce;
      }
      ++h.samples;
    }
  });
  SampleHistogram total;
  total.counts.assign(n, 0);
  for (const auto& h : partial) {
    for (std::size_t i = 0; i < h.counts.size(); ++i) total.counts[i] += h.counts[i];
    total.did_not_coalesce += h.did_not_coalesce;
    total.samples += h.samples;
  }
  return total;
}

double total_variation(const SampleHistogram& histogram, const ProbabilityVector& pi) {
  if (histogram.counts.size() != pi.size()) throw Error(ErrorKind::DimensionMismatch, "histogram vs distribution");
  const std::uint64_t coalesced = histogram.samples - histogram.did_not_coalesce;
  if (coalesced == 0) return 1.0;
  double sum = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    sum += std::abs(static_cast<double>(histogram.counts[i]) / static_cast<double>(coalesced) - to_double(pi[i]));
  }
  return sum / 2;
}

EquidistributionReport equidistribution_check(const GrandCoupling& mu, std::uint64_t runs, std::uint64_t t_max,
                                              const RngStream& stream, double threshold, unsigned threads) {
  EquidistributionReport report;
  report.runs = runs;
  report.t_max = t_max;
  report.threshold = threshold;
  SamplerOptions options;
  options.t_max = t_max;
  const PerfectSampler guard(mu, options);
  if (!guard.can_coalesce()) {
    report.backward_censored = report.forward_censored = runs;
    report.pass = true;
    return report;
  }
  if (threads == 0) threads = default_thread_count();
  struct Partial {
    std::map<std::uint64_t, std::uint64_t> backward, forward;
    std::uint64_t backward_censored = 0, forward_censored = 0;
  };
  std::vector<Partial> partial(threads);
  parallel_chunks(runs, threads, [&](std::size_t begin, std::size_t end, unsigned w) {
    Partial& p = partial[w];
    for (std::size_t r = begin; r < end; ++r) {
      const auto c = backward_coalescence(guard.sampler(), stream.derive(2 * r), t_max);
      const auto t = forward_coalescence(guard.sampler(), stream.derive(2 * r + 1), t_max);
      if (c.time) ++p.backward[*c.time]; else ++p.backward_censored;
      if (t.time) ++p.forward[*t.time]; else ++p.forward_censored;
    }
  });
  for (const auto& p : partial) {
    for (const auto& [k, v] : p.backward) report.backward_times[k] += v;
    for (const auto& [k, v] : p.forward) report.forward_times[k] += v;
    report.backward_censored += p.backward_censored;
    report.forward_censored += p.forward_censored;
  }
  // Both empirical CDFs are step functions jumping only at observed times.
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> jumps;
  for (const auto& [k, v] : report.backward_times) jumps[k].first += v;
  for (const auto& [k, v] : report.forward_times) jumps[k].second += v;
  std::uint64_t cb = 0, cf = 0;
  double gap = 0;
  for (const auto& [k, counts] : jumps) {
    cb += counts.first;
    cf += counts.second;
    gap = std::max(gap, std::abs(static_cast<double>(cb) - static_cast<double>(cf)) / static_cast<double>(runs));
  }
  report.max_cdf_gap = gap;
  report.pass = gap < threshold;
  return report;
}

}  // namespace coalesce
