#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace coalesce {

/// allowed[r][c]: edge between row r and column c of a square bipartite graph.
using BipartiteGrid = std::vector<std::vector<bool>>;

/// Size of a maximum matching (Kuhn's augmenting paths, vertices scanned in
/// index order).
std::size_t maximum_matching_size(const BipartiteGrid& allowed);

/// Lexicographically least perfect matching as row -> column, or nullopt.
std::optional<std::vector<std::size_t>> least_perfect_matching(const BipartiteGrid& allowed);

}  // namespace coalesce
