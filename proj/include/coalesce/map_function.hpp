#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coalesce {

using State = std::uint16_t;

/// A total function on the states {0..n-1}. In text form states are 1-based
/// and written either as packed digits, "3434" (n <= 9), or as a
/// comma-separated list, "3,4,3,4".
class MapFunction {
 public:
  MapFunction() = default;
  /// 0-based images. Throws MalformedInput if any image is >= size.
  explicit MapFunction(std::vector<State> image);

  static MapFunction identity(std::size_t n);
  static MapFunction constant(std::size_t n, State value);
  /// If n is nonzero the parsed size must match it.
  static MapFunction parse(std::string_view text, std::size_t n = 0);

  std::size_t size() const noexcept { return image_.size(); }
  State operator()(std::size_t i) const { return image_[i]; }
  std::span<const State> image() const noexcept { return image_; }

  /// Number of distinct values; equals the rank of the 0-1 matrix of f.
  std::size_t image_size() const;
  bool is_permutation() const { return image_size() == size(); }
  bool is_constant() const { return image_size() == 1; }

  std::string to_string() const;

  auto operator<=>(const MapFunction& other) const = default;
  bool operator==(const MapFunction& other) const = default;

 private:
  std::vector<State> image_;
};

/// outer ∘ inner, i.e. x ↦ outer(inner(x)): inner is applied first.
/// Throws DimensionMismatch.
MapFunction compose(const MapFunction& outer, const MapFunction& inner);

inline std::size_t image_size(const MapFunction& f) { return f.image_size(); }

struct MapFunctionHash {
  std::size_t operator()(const MapFunction& f) const noexcept;
};

}  // namespace coalesce
