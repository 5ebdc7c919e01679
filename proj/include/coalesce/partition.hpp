#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace coalesce {

/// Disjoint non-empty blocks covering {0..n-1}. Blocks are kept sorted
/// internally and ordered by their least element, so equal partitions compare
/// equal regardless of how they were written.
class Partition {
 public:
  Partition() = default;
  /// Throws MalformedInput on overlap, gaps or empty blocks.
  Partition(std::size_t n, std::vector<std::vector<std::size_t>> blocks);

  static Partition singletons(std::size_t n);
  static Partition whole(std::size_t n);
  /// l consecutive blocks of size n/l. Throws NotADivisor.
  static Partition consecutive(std::size_t n, std::size_t l);
  /// "1,2|3,4" with 1-based states.
  static Partition parse(std::string_view text, std::size_t n);

  std::size_t state_count() const noexcept { return block_of_.size(); }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }
  const std::vector<std::size_t>& block(std::size_t r) const { return blocks_[r]; }
  std::size_t block_of(std::size_t state) const { return block_of_[state]; }

  /// "{1,3},{2,4}"
  std::string to_string() const;

  auto operator<=>(const Partition& other) const { return blocks_ <=> other.blocks_; }
  bool operator==(const Partition& other) const { return blocks_ == other.blocks_; }

 private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_;
};

/// Every set partition of {0..n-1}, in restricted-growth-string order.
std::vector<Partition> all_partitions(std::size_t n);

}  // namespace coalesce
