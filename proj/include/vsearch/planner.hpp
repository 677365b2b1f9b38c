#pragma once

// N-step lookahead over ray-guided actions, solved by exhaustive dynamic programming.
//
// Each tree node fans rays from its simulated position and expands the N_a best directions. An
// action accelerates uniformly over one step toward full speed along its direction; its reward is
// the probability mass of the cells crossed, counting every cell at most once per branch.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vsearch/geometry.hpp"
#include "vsearch/partition.hpp"
#include "vsearch/rays.hpp"
#include "vsearch/trajectory.hpp"
#include "vsearch/world.hpp"

namespace vsearch {

struct PlannerParams {
  int n_steps{5};
  double step_time{1.0};
  std::size_t n_rays{36};
  std::size_t n_actions{3};
  double discount{0.95};
  KinoLimits limits{};

  void validate() const {
    if (n_steps < 1) throw std::invalid_argument("PlannerParams: n_steps must be >= 1");
    if (!(step_time > 0.0)) throw std::invalid_argument("PlannerParams: step_time must be > 0");
    if (n_rays < 2) throw std::invalid_argument("PlannerParams: n_rays must be >= 2");
    if (n_actions < 1 || n_actions > n_rays) throw std::invalid_argument("PlannerParams: n_actions must be in [1, n_rays]");
    if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("PlannerParams: discount must be in (0, 1]");
    limits.validate();
  }
};

struct LookaheadPlan {
  std::vector<Vec2> waypoints;   // waypoints[0] is the planning position
  std::vector<Vec2> velocities;  // simulated velocity at each waypoint
  std::vector<double> actions;   // chosen direction per step
  std::vector<double> rewards;   // undiscounted reward per step
  double total_reward{0.0};      // discounted objective
  Vec2 terminal{};
};

/// Work counters for one plan_lookahead call.
struct PlanStats {
  std::uint64_t nodes{0};
  std::uint64_t cells_visited{0};
};

/// Cells already credited along the current branch. Branches are short, so a flat list is enough.
class VisitedCells {
 public:
  bool contains(std::size_t idx) const {
    for (std::size_t v : cells_)
      if (v == idx) return true;
    return false;
  }
  void insert(std::size_t idx) { cells_.push_back(idx); }
  std::size_t mark() const { return cells_.size(); }
  void rewind(std::size_t mark) { cells_.resize(mark); }
  std::size_t size() const { return cells_.size(); }

 private:
  std::vector<std::size_t> cells_;
};

inline Vec2 terminal_velocity(double angle, double v_max) { return Vec2{v_max * std::cos(angle), v_max * std::sin(angle)}; }

/// Uniformly accelerated step: the velocity reaches terminal_velocity(angle) after step_time and
/// the position advances by the mean velocity, clamped to the workspace.
inline std::pair<Vec2, Vec2> step_simulate(const Vec2& position, const Vec2& velocity, double angle,
                                           const PlannerParams& params, const GridShape& workspace) {
  const Vec2 v_next = terminal_velocity(angle, params.limits.v_max);
  const Vec2 p_next = workspace.clamp(position + params.step_time * 0.5 * (velocity + v_next));
  return {p_next, v_next};
}

/// Mass of cells crossed by from -> to that are admitted by `mask` and not yet in `visited`;
/// the credited cells are appended to `visited`.
inline double action_reward(const Vec2& from, const Vec2& to, const ProbabilityMap& map, VisitedCells& visited,
                            const RegionMask& mask = {}, std::uint64_t* cells_visited = nullptr) {
  const GridShape& shape = map.shape();
  double reward = 0.0;
  walk_supercover(shape, from, to - from, 1.0, [&](const Cell& c) {
    const std::size_t idx = shape.index(c);
    if (cells_visited) ++*cells_visited;
    if (mask.admits(idx) && !visited.contains(idx)) {
      visited.insert(idx);
      reward += map[idx];
    }
    return true;
  });
  return reward;
}

namespace detail {

struct Suffix {
  std::vector<double> actions;
  std::vector<double> rewards;
  std::vector<Vec2> waypoints;
  std::vector<Vec2> velocities;
};

class LookaheadSearch {
 public:
  LookaheadSearch(const ProbabilityMap& map, const RegionMask& mask, const PlannerParams& params, PlanStats& stats)
      : map_(map), mask_(mask), params_(params), stats_(stats) {}

  std::vector<double> candidates(const Vec2& position) {
    ++stats_.nodes;
    const RayFan fan = compute_fan(position, params_.n_rays, map_, mask_, &stats_.cells_visited);
    std::vector<double> cands = top_directions(fan, params_.n_actions);
    std::sort(cands.begin(), cands.end());  // ascending angle: first maximum wins ties
    return cands;
  }

  // Best discounted value of the subtree below a node at `depth`, and its action suffix.
  double search(int depth, const Vec2& position, const Vec2& velocity, VisitedCells& visited, Suffix& best) {
    best = Suffix{};
    if (depth == params_.n_steps) return 0.0;
    const std::vector<double> cands = candidates(position);
    return expand(depth, position, velocity, cands, visited, best);
  }

  double expand(int depth, const Vec2& position, const Vec2& velocity, const std::vector<double>& cands,
                VisitedCells& visited, Suffix& best) {
    const double weight = std::pow(params_.discount, depth);
    double best_value = -1.0;
    Suffix child;
    for (double angle : cands) {
      const auto [p_next, v_next] = step_simulate(position, velocity, angle, params_, map_.shape());
      const std::size_t mark = visited.mark();
      const double reward = action_reward(position, p_next, map_, visited, mask_, &stats_.cells_visited);
      const double value = weight * reward + search(depth + 1, p_next, v_next, visited, child);
      visited.rewind(mark);
      if (value > best_value) {
        best_value = value;
        best.actions.assign(1, angle);
        best.rewards.assign(1, reward);
        best.waypoints.assign(1, p_next);
        best.velocities.assign(1, v_next);
        best.actions.insert(best.actions.end(), child.actions.begin(), child.actions.end());
        best.rewards.insert(best.rewards.end(), child.rewards.begin(), child.rewards.end());
        best.waypoints.insert(best.waypoints.end(), child.waypoints.begin(), child.waypoints.end());
        best.velocities.insert(best.velocities.end(), child.velocities.begin(), child.velocities.end());
      }
    }
    return cands.empty() ? 0.0 : best_value;
  }

 private:
  const ProbabilityMap& map_;
  const RegionMask& mask_;
  const PlannerParams& params_;
  PlanStats& stats_;
};

}  // namespace detail

/// Highest-value action sequence of up to n_steps steps from `state`; nullopt when the root fan
/// carries no mass or no sequence earns any reward.
inline std::optional<LookaheadPlan> plan_lookahead(const AgentState& state, const ProbabilityMap& map,
                                                   const RegionMask& mask, const PlannerParams& params,
                                                   PlanStats* stats_out = nullptr) {
  params.validate();
  if (!map.shape().contains(state.position) || !is_finite(state.position))
    throw std::invalid_argument("plan_lookahead: position outside workspace");

  PlanStats stats;
  detail::LookaheadSearch search(map, mask, params, stats);
  const std::vector<double> root = search.candidates(state.position);
  std::optional<LookaheadPlan> result;
  if (!root.empty()) {
    VisitedCells visited;
    detail::Suffix best;
    const double value = search.expand(0, state.position, state.velocity, root, visited, best);
    if (value > 0.0) {
      LookaheadPlan plan;
      plan.waypoints.push_back(state.position);
      plan.velocities.push_back(state.velocity);
      plan.waypoints.insert(plan.waypoints.end(), best.waypoints.begin(), best.waypoints.end());
      plan.velocities.insert(plan.velocities.end(), best.velocities.begin(), best.velocities.end());
      plan.actions = std::move(best.actions);
      plan.rewards = std::move(best.rewards);
      plan.total_reward = value;
      plan.terminal = plan.waypoints.back();
      result = std::move(plan);
    }
  }
  if (stats_out) *stats_out = stats;
  return result;
}

inline std::optional<LookaheadPlan> plan_lookahead(const AgentState& state, const ProbabilityMap& map,
                                                   const PlannerParams& params, PlanStats* stats_out = nullptr) {
  return plan_lookahead(state, map, RegionMask{}, params, stats_out);
}

}  // namespace vsearch
