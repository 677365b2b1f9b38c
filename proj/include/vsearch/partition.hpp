#pragma once

// Grid Voronoi partition of the workspace among agents.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vsearch/geometry.hpp"
#include "vsearch/world.hpp"

namespace vsearch {

/// Cell -> agent assignment aligned with a ProbabilityMap.
struct VoronoiLabeling {
  GridShape shape{};
  std::vector<std::uint16_t> labels;
  std::vector<Vec2> generators;

  std::size_t n_agents() const { return generators.size(); }
  std::uint16_t label(std::size_t idx) const { return labels[idx]; }
  std::uint16_t label(const Cell& c) const { return labels[shape.index(c)]; }

  std::size_t region_size(std::size_t agent) const {
    std::size_t n = 0;
    for (auto l : labels) n += l == agent ? 1 : 0;
    return n;
  }
};

/// Restricts queries to one agent's region. A default-constructed mask admits every cell.
struct RegionMask {
  const VoronoiLabeling* labeling{nullptr};
  std::size_t agent{0};

  bool active() const { return labeling != nullptr; }
  bool admits(std::size_t idx) const { return labeling == nullptr || labeling->labels[idx] == agent; }
  bool admits(const GridShape& shape, const Cell& c) const { return admits(shape.index(c)); }
};

/// Nearest-generator labeling of cell centers; ties go to the smaller agent index.
inline VoronoiLabeling partition(std::span<const Vec2> positions, const GridShape& shape) {
  if (positions.empty()) throw std::invalid_argument("partition: empty position list");
  if (positions.size() > 0xFFFF) throw std::invalid_argument("partition: too many agents");
  for (const Vec2& p : positions)
    if (!shape.contains(p)) throw std::invalid_argument("partition: agent position outside workspace");

  VoronoiLabeling out{shape, std::vector<std::uint16_t>(shape.cell_count(), 0), {positions.begin(), positions.end()}};
  if (positions.size() == 1) return out;
  for (std::size_t idx = 0; idx < out.labels.size(); ++idx) {
    const Vec2 c = shape.center(idx);
    std::size_t best = 0;
    double best_d2 = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const double dx = c.x - positions[i].x;
      const double dy = c.y - positions[i].y;
      const double d2 = dx * dx + dy * dy;
      if (i == 0 || d2 < best_d2) {
        best = i;
        best_d2 = d2;
      }
    }
    out.labels[idx] = static_cast<std::uint16_t>(best);
  }
  return out;
}

inline VoronoiLabeling partition(std::span<const Vec2> positions, const ProbabilityMap& map) {
  return partition(positions, map.shape());
}

/// Center of the highest-valued cell admitted by `mask` (first in row-major order on ties);
/// nullopt when every admitted cell is zero.
inline std::optional<Vec2> global_maxima(const ProbabilityMap& map, const RegionMask& mask = {}) {
  std::optional<std::size_t> best;
  double best_v = 0.0;
  const auto values = map.values();
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (!mask.admits(idx)) continue;
    if (values[idx] > best_v) {
      best_v = values[idx];
      best = idx;
    }
  }
  if (!best) return std::nullopt;
  return map.shape().center(*best);
}

inline std::optional<Vec2> global_maxima(const VoronoiLabeling& labeling, std::size_t agent, const ProbabilityMap& map) {
  if (agent >= labeling.n_agents()) throw std::invalid_argument("global_maxima: agent index out of range");
  return global_maxima(map, RegionMask{&labeling, agent});
}

}  // namespace vsearch
