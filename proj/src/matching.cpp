#include "coalesce/matching.hpp"

#include <limits>

namespace coalesce {

namespace {

constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();

class Kuhn {
 public:
  Kuhn(const BipartiteGrid& allowed, const std::vector<bool>& row_active, const std::vector<bool>& col_active)
      : allowed_(allowed), row_active_(row_active), col_active_(col_active),
        match_col_(allowed.size(), kFree) {}

  std::size_t run() {
    std::size_t size = 0;
    for (std::size_t r = 0; r < allowed_.size(); ++r) {
      if (!row_active_[r]) continue;
      visited_.assign(allowed_.size(), false);
      if (augment(r)) ++size;
    }
    return size;
  }

 private:
  bool augment(std::size_t r) {
    for (std::size_t c = 0; c < allowed_.size(); ++c) {
      if (!allowed_[r][c] || !col_active_[c] || visited_[c]) continue;
      visited_[c] = true;
      if (match_col_[c] == kFree || augment(match_col_[c])) {
        match_col_[c] = r;
        return true;
      }
    }
    return false;
  }

  const BipartiteGrid& allowed_;
  const std::vector<bool>& row_active_;
  const std::vector<bool>& col_active_;
  std::vector<std::size_t> match_col_;
  std::vector<bool> visited_;
};

}  // namespace

std::size_t maximum_matching_size(const BipartiteGrid& allowed) {
  const std::vector<bool> all(allowed.size(), true);
  return Kuhn(allowed, all, all).run();
}

std::optional<std::vector<std::size_t>> least_perfect_matching(const BipartiteGrid& allowed) {
  const std::size_t n = allowed.size();
  std::vector<bool> row_active(n, true), col_active(n, true);
  if (Kuhn(allowed, row_active, col_active).run() != n) return std::nullopt;
  // Fix rows in order, each to the least column that still leaves a perfect
  // matching on what remains.
  std::vector<std::size_t> assignment(n, kFree);
  for (std::size_t r = 0; r < n; ++r) {
    row_active[r] = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (!allowed[r][c] || !col_active[c]) continue;
      col_active[c] = false;
      if (Kuhn(allowed, row_active, col_active).run() == n - r - 1) {
        assignment[r] = c;
        break;
      }
      col_active[c] = true;
    }
  }
  return assignment;
}

}  // namespace coalesce
