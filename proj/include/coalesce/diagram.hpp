#pragma once

#include <cstdint>
#include <string>

#include "coalesce/coupling.hpp"
#include "coalesce/rng.hpp"

namespace coalesce {

enum class DiagramFormat { Ascii, Dot };

/// Forward trajectories of every start state for t = 0..t_max, using the
/// functions F_1, F_2, ... of the stream. Cells (state, t) hold the number of
/// trajectories there, so merged classes show up as one cell. Throws
/// TooManyStates for more than 50 states.
std::string emit_trajectory_diagram(const GrandCoupling& mu, const RngStream& stream, std::uint64_t t_max,
                                    DiagramFormat format);

}  // namespace coalesce
