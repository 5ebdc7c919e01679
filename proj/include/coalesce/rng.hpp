#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "coalesce/rational.hpp"

namespace coalesce {

/// Philox4x64-10 block function: 256-bit counter, 128-bit key.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter, std::array<std::uint64_t, 2> key);

/// Deterministic generator for one substream: successive outputs come from
/// counters (block, index, 0, 0), block = 0, 1, 2, ...
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::array<std::uint64_t, 2> key, std::uint64_t index) : key_(key), index_(index) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform on [0, bound) for arbitrary-precision bound > 0.
  mpz_class below(const mpz_class& bound);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  unsigned used_ = 4;
};

/// A seed plus the ability to address independent substreams by index:
/// substream(s) always yields the same sequence for the same s.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_{seed, 0} {}

  std::uint64_t seed() const noexcept { return key_[0]; }

  CounterRng substream(std::uint64_t index) const { return CounterRng(key_, index); }

  /// Statistically independent stream for a tag (run number, role, ...).
  RngStream derive(std::uint64_t tag) const;

 private:
  RngStream(std::array<std::uint64_t, 2> key) : key_(key) {}

  std::array<std::uint64_t, 2> key_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace coalesce
