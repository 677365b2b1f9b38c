#pragma once

// Goal selection for the proposed lookahead planner and the baseline strategies.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsearch/geometry.hpp"
#include "vsearch/partition.hpp"
#include "vsearch/planner.hpp"
#include "vsearch/trajectory.hpp"
#include "vsearch/world.hpp"

namespace vsearch {

enum class StrategyKind { ZigZag, GlobalMaxima, LocalMaxima, HeuristicLocalMaxima, Proposed };

inline constexpr std::array<StrategyKind, 5> kAllStrategyKinds{StrategyKind::ZigZag, StrategyKind::GlobalMaxima,
                                                                StrategyKind::LocalMaxima,
                                                                StrategyKind::HeuristicLocalMaxima, StrategyKind::Proposed};

inline std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::ZigZag: return "zigzag";
    case StrategyKind::GlobalMaxima: return "gm";
    case StrategyKind::LocalMaxima: return "lm";
    case StrategyKind::HeuristicLocalMaxima: return "hlm";
    case StrategyKind::Proposed: return "proposed";
  }
  return "?";
}

struct StrategyConfig {
  StrategyKind kind{StrategyKind::Proposed};
  double local_radius{10.0};
  double radius_growth{2.0};

  void validate() const {
    if (!(local_radius > 0.0)) throw std::invalid_argument("StrategyConfig: local_radius must be > 0");
    if (!(radius_growth > 1.0)) throw std::invalid_argument("StrategyConfig: radius_growth must be > 1");
  }
};

/// Per-agent state carried between rounds (the boustrophedon cursor).
struct AgentMemory {
  std::vector<Vec2> sweep;
  std::size_t cursor{0};
  bool sweep_ready{false};
};

struct GoalDecision {
  std::optional<Vec2> goal;
  bool stuck{false};
  bool from_lookahead{false};
  std::optional<LookaheadPlan> plan;
  PlanStats stats{};
};

inline double region_mass(const ProbabilityMap& map, const RegionMask& mask) {
  double s = 0.0;
  const auto v = map.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (mask.admits(i)) s += v[i];
  return s;
}

/// Highest-valued admitted cell whose center lies within `radius` of `position` (row-major
/// order on ties).
inline std::optional<Vec2> local_maxima(const ProbabilityMap& map, const RegionMask& mask, const Vec2& position,
                                        double radius) {
  const GridShape& shape = map.shape();
  const double cs = shape.cell_size;
  const int c0 = std::max(0, static_cast<int>(std::floor((position.x - radius) / cs)));
  const int c1 = std::min(shape.cols - 1, static_cast<int>(std::floor((position.x + radius) / cs)));
  const int r0 = std::max(0, static_cast<int>(std::floor((position.y - radius) / cs)));
  const int r1 = std::min(shape.rows - 1, static_cast<int>(std::floor((position.y + radius) / cs)));
  std::optional<std::size_t> best;
  double best_v = 0.0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const std::size_t idx = shape.index(Cell{c, r});
      if (!mask.admits(idx) || !(map[idx] > best_v)) continue;
      if (distance(shape.center(idx), position) > radius) continue;
      best_v = map[idx];
      best = idx;
    }
  }
  if (!best) return std::nullopt;
  return shape.center(*best);
}

namespace detail {

// Lanes of the sweep, each ordered left to right, bottom lane first. A lane whose band reaches
// further sideways than its own row starts or ends with a detour to the extreme admitted cell.
inline std::vector<std::vector<Vec2>> zigzag_lanes(const GridShape& shape, const RegionMask& mask,
                                                   const SensorModel& sensor) {
  sensor.validate();
  int row_lo = shape.rows, row_hi = -1;
  for (std::size_t idx = 0; idx < shape.cell_count(); ++idx) {
    if (!mask.admits(idx)) continue;
    const int r = shape.cell_at(idx).row;
    row_lo = std::min(row_lo, r);
    row_hi = std::max(row_hi, r);
  }
  if (row_hi < 0) throw std::invalid_argument("zigzag_waypoints: empty region");

  const double cs = shape.cell_size;
  const double h = sensor.half_side;
  const double y_lo = row_lo * cs;
  const double y_hi = (row_hi + 1) * cs;
  const int n_lanes = std::max(1, static_cast<int>(std::ceil((y_hi - y_lo) / (2.0 * h) - 1e-9)));

  auto row_span = [&](int r) {
    std::pair<int, int> span{shape.cols, -1};
    for (int c = 0; c < shape.cols; ++c) {
      if (!mask.admits(shape, Cell{c, r})) continue;
      span.first = std::min(span.first, c);
      span.second = std::max(span.second, c);
    }
    return span;
  };

  std::vector<std::vector<Vec2>> lanes;
  for (int k = 0; k < n_lanes; ++k) {
    const double y = std::min(y_lo + h + 2.0 * h * k, y_hi);
    const int lane_row = std::clamp(static_cast<int>(std::floor(y / cs)), row_lo, row_hi);
    int col_lo = shape.cols, col_hi = -1, row_left = -1, row_right = -1;
    for (int r = row_lo; r <= row_hi; ++r) {
      if (std::abs((r + 0.5) * cs - y) > h) continue;
      const auto [a, b] = row_span(r);
      if (b < 0) continue;
      const double dist = std::abs((r + 0.5) * cs - y);
      if (a < col_lo || (a == col_lo && dist < std::abs((row_left + 0.5) * cs - y))) {
        col_lo = a;
        row_left = r;
      }
      if (b > col_hi || (b == col_hi && dist < std::abs((row_right + 0.5) * cs - y))) {
        col_hi = b;
        row_right = r;
      }
    }
    if (col_hi < 0) continue;

    std::vector<Vec2> lane;
    auto push = [&](const Vec2& p) {
      if (lane.empty() || !(lane.back() == p)) lane.push_back(p);
    };
    const Vec2 left{(col_lo + 0.5) * cs, (row_left + 0.5) * cs};
    const Vec2 right{(col_hi + 0.5) * cs, (row_right + 0.5) * cs};
    const auto [a, b] = row_span(lane_row);
    if (b < 0) {
      push(left);
      push(right);
    } else {
      if (col_lo < a) push(left);
      push(Vec2{(a + 0.5) * cs, y});
      push(Vec2{(b + 0.5) * cs, y});
      if (col_hi > b) push(right);
    }
    lanes.push_back(std::move(lane));
  }
  return lanes;
}

inline std::vector<Vec2> serpentine(const std::vector<std::vector<Vec2>>& lanes, bool from_top, bool first_left_to_right) {
  std::vector<Vec2> out;
  bool ltr = first_left_to_right;
  for (std::size_t n = 0; n < lanes.size(); ++n) {
    const auto& lane = lanes[from_top ? lanes.size() - 1 - n : n];
    if (ltr)
      out.insert(out.end(), lane.begin(), lane.end());
    else
      out.insert(out.end(), lane.rbegin(), lane.rend());
    ltr = !ltr;
  }
  return out;
}

// The serpentine over the region whose entry point is nearest to `position`.
inline std::vector<Vec2> oriented_sweep(const GridShape& shape, const RegionMask& mask, const SensorModel& sensor,
                                        const Vec2& position) {
  const auto lanes = zigzag_lanes(shape, mask, sensor);
  std::vector<Vec2> best;
  for (bool from_top : {false, true})
    for (bool ltr : {true, false}) {
      auto s = serpentine(lanes, from_top, ltr);
      if (best.empty() || distance(s.front(), position) < distance(best.front(), position)) best = std::move(s);
    }
  return best;
}

}  // namespace detail

/// Boustrophedon lanes parallel to x, spaced one sensor side apart, covering the admitted cells.
/// Lanes run bottom to top with alternating direction.
inline std::vector<Vec2> zigzag_waypoints(const GridShape& shape, const RegionMask& mask, const SensorModel& sensor) {
  return detail::serpentine(detail::zigzag_lanes(shape, mask, sensor), false, true);
}

inline std::vector<Vec2> zigzag_waypoints(const ProbabilityMap& map, const RegionMask& mask, const SensorModel& sensor) {
  return zigzag_waypoints(map.shape(), mask, sensor);
}

/// Next goal for one agent. `mask` is the agent's region (inactive for whole-map search).
inline GoalDecision next_goal(const StrategyConfig& strategy, const AgentState& state, const ProbabilityMap& map,
                              const RegionMask& mask, const PlannerParams& planner, const SensorModel& sensor,
                              AgentMemory& memory) {
  GoalDecision out;
  if (!(region_mass(map, mask) > 0.0)) return out;

  switch (strategy.kind) {
    case StrategyKind::ZigZag: {
      if (!memory.sweep_ready) {
        memory.sweep = detail::oriented_sweep(map.shape(), mask, sensor, state.position);
        memory.cursor = 0;
        memory.sweep_ready = true;
      }
      if (memory.cursor < memory.sweep.size()) out.goal = memory.sweep[memory.cursor++];
      break;
    }
    case StrategyKind::GlobalMaxima:
      out.goal = global_maxima(map, mask);
      break;
    case StrategyKind::LocalMaxima:
      out.goal = local_maxima(map, mask, state.position, strategy.local_radius);
      out.stuck = !out.goal.has_value();
      break;
    case StrategyKind::HeuristicLocalMaxima: {
      const GridShape& shape = map.shape();
      const double reach = std::hypot(shape.width_m(), shape.height_m());
      double radius = strategy.local_radius;
      for (;;) {
        out.goal = local_maxima(map, mask, state.position, radius);
        if (out.goal || radius >= reach) break;
        out.stuck = true;
        radius *= strategy.radius_growth;
      }
      break;
    }
    case StrategyKind::Proposed: {
      out.plan = plan_lookahead(state, map, mask, planner, &out.stats);
      if (out.plan) {
        // Keep the goal inside the agent's own region: stop at the last simulated waypoint there.
        const GridShape& shape = map.shape();
        for (std::size_t k = out.plan->waypoints.size(); k-- > 1;) {
          const Vec2& w = out.plan->waypoints[k];
          if (mask.admits(shape.index(shape.cell_of(w)))) {
            out.goal = w;
            out.from_lookahead = true;
            break;
          }
        }
      }
      if (!out.goal) out.goal = global_maxima(map, mask);
      break;
    }
  }
  return out;
}

}  // namespace vsearch
