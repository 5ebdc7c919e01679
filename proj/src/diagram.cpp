#include "coalesce/diagram.hpp"

#include <iomanip>
#include <sstream>
#include <vector>

#include "coalesce/cftp.hpp"
#include "coalesce/error.hpp"

namespace coalesce {

namespace {

std::string ascii(const std::vector<std::vector<std::size_t>>& occupancy, const std::vector<MapFunction>& steps) {
  const std::size_t n = occupancy.front().size();
  std::ostringstream os;
  os << "state";
  for (std::size_t t = 0; t < occupancy.size(); ++t) os << std::setw(5) << ("t" + std::to_string(t));
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    os << std::setw(5) << i + 1;
    for (const auto& column : occupancy) {
      if (column[i] == 0) {
        os << std::setw(5) << '.';
      } else {
        os << std::setw(5) << column[i];
      }
    }
    os << '\n';
  }
  os << "k_t:";
  for (const auto& column : occupancy) {
    std::size_t k = 0;
    for (std::size_t c : column) k += c > 0;
    os << ' ' << k;
  }
  os << '\n';
  for (std::size_t t = 0; t < steps.size(); ++t) {
    os << "t" << t << "->t" << t + 1 << ':';
    for (std::size_t i = 0; i < n; ++i)
      if (occupancy[t][i] > 0) os << ' ' << i + 1 << "->" << steps[t](i) + 1;
    os << '\n';
  }
  return os.str();
}

std::string dot(const std::vector<std::vector<std::size_t>>& occupancy, const std::vector<MapFunction>& steps) {
  const std::size_t n = occupancy.front().size();
  std::ostringstream os;
  os << "digraph trajectories {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (std::size_t t = 0; t < occupancy.size(); ++t) {
    os << "  { rank=same;";
    for (std::size_t i = 0; i < n; ++i) {
      if (occupancy[t][i] == 0) continue;
      os << " s" << i + 1 << "_t" << t << " [label=\"" << i + 1 << "\"";
      if (occupancy[t][i] > 1) os << ", penwidth=" << occupancy[t][i] << ", xlabel=\"x" << occupancy[t][i] << "\"";
      os << "];";
    }
    os << " }\n";
  }
  for (std::size_t t = 0; t < steps.size(); ++t)
    for (std::size_t i = 0; i < n; ++i)
      if (occupancy[t][i] > 0)
        os << "  s" << i + 1 << "_t" << t << " -> s" << steps[t](i) + 1 << "_t" << t + 1 << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace

std::string emit_trajectory_diagram(const GrandCoupling& mu, const RngStream& stream, std::uint64_t t_max,
                                    DiagramFormat format) {
  const std::size_t n = mu.state_count();
  if (n > 50) throw Error(ErrorKind::TooManyStates, std::to_string(n) + " states; diagrams take at most 50");
  const CouplingSampler sampler(mu);
  std::vector<MapFunction> steps;
  std::vector<std::vector<std::size_t>> occupancy;
  MapFunction composite = MapFunction::identity(n);
  auto snapshot = [&] {
    std::vector<std::size_t> column(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++column[composite(i)];
    occupancy.push_back(std::move(column));
  };
  snapshot();
  for (std::uint64_t t = 1; t <= t_max; ++t) {
    steps.push_back(sampler.at(stream, t));
    composite = compose(steps.back(), composite);
    snapshot();
  }
  return format == DiagramFormat::Ascii ? ascii(occupancy, steps) : dot(occupancy, steps);
}

}  // namespace coalesce
