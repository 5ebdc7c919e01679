#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coalesce/stochastic_matrix.hpp"

namespace coalesce {

struct ReproductionRow {
  std::string id;
  std::string description;
  std::string expected;
  std::string computed;
  bool pass = false;
};

struct ReproductionOptions {
  /// Run only the row with this id.
  std::optional<std::string> only;
  /// Replaces the 3-state lazy cycle wherever a check uses it.
  std::optional<StochasticMatrix> lazy_cycle3;
  std::uint64_t seed = 20240607;
  unsigned threads = 0;
};

/// Ids of every known reproduction, in run order.
std::vector<std::string> reproduction_ids();

/// Runs the built-in worked examples end to end. Throws
/// MalformedInput for an unknown `only` id.
std::vector<ReproductionRow> run_reproductions(const ReproductionOptions& options = {});

}  // namespace coalesce
