#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coalesce/coupling.hpp"
#include "coalesce/map_function.hpp"
#include "coalesce/partition.hpp"

namespace coalesce {

inline constexpr std::size_t kDefaultClosureCap = 1'000'000;

// Composition convention throughout: a word [g_1, ..., g_t] over the
// generators denotes the forward product g_t ∘ ... ∘ g_1, so g_1 is applied
// first.

/// Semigroup generated by a support under composition. Elements are sorted;
/// each carries one shortest generating word (found by BFS).
class SemigroupClosure {
 public:
  const Support& generators() const noexcept { return generators_; }
  const std::vector<MapFunction>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }

  /// Generator indices in application order.
  std::vector<std::size_t> word(std::size_t element) const;
  std::size_t word_length(std::size_t element) const { return depth_[element]; }
  /// Longest shortest-word over all elements.
  std::size_t max_word_length() const;
  std::size_t min_image_size() const;
  /// Index of an element, or size() if absent.
  std::size_t find(const MapFunction& f) const;

 private:
  friend SemigroupClosure close(const Support& support, std::size_t max_elements);
  explicit SemigroupClosure(Support generators) : generators_(std::move(generators)) {}

  Support generators_;
  std::vector<MapFunction> elements_;
  std::vector<std::size_t> parent_;     // npos for a generator
  std::vector<std::size_t> last_;       // generator applied last
  std::vector<std::size_t> depth_;
};

/// BFS fixpoint. Throws ClosureTooLarge past max_elements.
SemigroupClosure close(const Support& support, std::size_t max_elements = kDefaultClosureCap);

/// Level-set partition of f.
Partition kernel(const MapFunction& f);

/// Minimum rank over all products of support elements. Computed as the
/// smallest image f_t(...f_1(S)) reachable from the full state set, which
/// equals the minimum image size over the closure without building it.
/// Throws ClosureTooLarge if more than max_sets image sets are visited.
std::size_t coalescence_number(const Support& support, std::size_t max_sets = kDefaultClosureCap);

using StatePair = std::pair<std::size_t, std::size_t>;  // first < second, 0-based
using PairSet = std::set<StatePair>;

/// Pairs {i,j} for which some word w has w(i) = w(j), by backward BFS on the
/// graph of unordered pairs plus a "merged" sink.
PairSet coalescing_pairs(const Support& support);

std::string to_string(const PairSet& pairs);

/// Kernels of the minimal-rank closure elements, sorted.
std::vector<Partition> limiting_partitions(const SemigroupClosure& closure);
std::vector<Partition> limiting_partitions(const Support& support,
                                           std::size_t max_elements = kDefaultClosureCap);

}  // namespace coalesce
