#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace vsearch;

namespace {

GoalDecision decide(StrategyKind kind, const Vec2& pos, const ProbabilityMap& map, const RegionMask& mask = {},
                    StrategyConfig cfg = {}) {
  cfg.kind = kind;
  AgentMemory mem;
  return next_goal(cfg, AgentState{pos, {}, {}}, map, mask, PlannerParams{}, SensorModel{}, mem);
}

std::set<double> lane_ys(const std::vector<Vec2>& w) {
  std::set<double> ys;
  for (const Vec2& p : w) ys.insert(p.y);
  return ys;
}

// Every admitted cell is sensed somewhere along the waypoint polyline.
bool sweep_covers(const GridShape& g, const RegionMask& mask, const std::vector<Vec2>& w, const SensorModel& s) {
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    const double len = distance(w[k], w[k + 1]);
    const int n = std::max(1, static_cast<int>(std::ceil(len / sweep_interval(g.cell_size, s))));
    for (int i = 0; i <= n; ++i)
      for (std::size_t idx : oracle::footprint(g, w[k] + (w[k + 1] - w[k]) * (double(i) / n), s.half_side))
        seen.insert(idx);
  }
  if (w.size() == 1)
    for (std::size_t idx : oracle::footprint(g, w[0], s.half_side)) seen.insert(idx);
  for (std::size_t idx = 0; idx < g.cell_count(); ++idx)
    if (mask.admits(idx) && !seen.count(idx)) return false;
  return true;
}

}  // namespace

TEST(NextGoal, DepletedRegionHasNoGoal) {
  const GridShape g{20, 20, 1.0};
  std::vector<double> v(g.cell_count(), 0.0);
  v[g.index(Cell{18, 18})] = 1.0;
  const ProbabilityMap map(g, v);
  const std::vector<Vec2> pos{Vec2{2, 2}, Vec2{18, 18}};
  const auto lab = partition(pos, g);
  for (StrategyKind k : kAllStrategyKinds) {
    const auto d = decide(k, pos[0], map, RegionMask{&lab, 0});
    EXPECT_FALSE(d.goal.has_value()) << to_string(k);
  }
  EXPECT_FALSE(decide(StrategyKind::Proposed, pos[0], ProbabilityMap::uniform(g, 0.0)).goal.has_value());
}

TEST(NextGoal, LocalMaximaGetsStuckHeuristicGrows) {
  const GridShape g{50, 50, 1.0};
  std::vector<double> v(g.cell_count(), 0.0);
  const Vec2 pos{10.5, 10.5};
  v[g.index(Cell{30, 10})] = 0.5;  // 20 m away = 2 * local_radius
  const ProbabilityMap map(g, v);
  const auto lm = decide(StrategyKind::LocalMaxima, pos, map);
  EXPECT_FALSE(lm.goal.has_value());
  EXPECT_TRUE(lm.stuck);
  const auto hlm = decide(StrategyKind::HeuristicLocalMaxima, pos, map);
  ASSERT_TRUE(hlm.goal.has_value());
  EXPECT_EQ(*hlm.goal, (Vec2{30.5, 10.5}));
  EXPECT_TRUE(hlm.stuck);
}

TEST(NextGoal, HeuristicAlwaysFindsPositiveCell) {
  const GridShape g{60, 40, 1.0};
  std::mt19937_64 rng(41);
  for (int k = 0; k < 30; ++k) {
    std::vector<double> v(g.cell_count(), 0.0);
    v[std::uniform_int_distribution<std::size_t>(0, g.cell_count() - 1)(rng)] = 1.0;
    const auto d = decide(StrategyKind::HeuristicLocalMaxima, oracle::random_point(g, rng), ProbabilityMap(g, v));
    EXPECT_TRUE(d.goal.has_value());
  }
}

TEST(NextGoal, GoalsStayInRegionAndGmIsArgmax) {
  const GridShape g{40, 40, 1.0};
  std::mt19937_64 rng(42);
  for (int k = 0; k < 10; ++k) {
    const auto map = oracle::random_map(g, rng, 0.3);
    std::vector<Vec2> pos;
    for (int i = 0; i < 4; ++i) pos.push_back(oracle::random_point(g, rng));
    const auto lab = partition(pos, g);
    for (std::size_t a = 0; a < pos.size(); ++a) {
      const RegionMask mask{&lab, a};
      for (StrategyKind kind : kAllStrategyKinds) {
        const auto d = decide(kind, pos[a], map, mask);
        if (!d.goal) continue;
        EXPECT_EQ(lab.label(g.cell_of(*d.goal)), a) << to_string(kind);
        if (kind == StrategyKind::GlobalMaxima) {
          const double gv = map.at(g.cell_of(*d.goal));
          for (std::size_t idx = 0; idx < g.cell_count(); ++idx)
            if (lab.labels[idx] == a) EXPECT_GE(gv, map[idx]);
        }
      }
    }
  }
}

TEST(NextGoal, ProposedUsesLookaheadTerminal) {
  const GridShape g{30, 30, 1.0};
  std::mt19937_64 rng(43);
  const auto map = oracle::random_map(g, rng);
  const auto d = decide(StrategyKind::Proposed, Vec2{15.2, 14.8}, map);
  ASSERT_TRUE(d.goal && d.plan);
  EXPECT_TRUE(d.from_lookahead);
  EXPECT_EQ(*d.goal, d.plan->terminal);
  EXPECT_GT(d.stats.nodes, 0u);
}

TEST(Zigzag, LaneCount) {
  const SensorModel s{2.5};
  EXPECT_EQ(lane_ys(zigzag_waypoints(GridShape{20, 50, 1.0}, RegionMask{}, s)).size(), 10u);
  EXPECT_EQ(lane_ys(zigzag_waypoints(GridShape{20, 5, 1.0}, RegionMask{}, s)).size(), 1u);
}

TEST(Zigzag, SerpentineOrder) {
  const auto w = zigzag_waypoints(GridShape{20, 20, 1.0}, RegionMask{}, SensorModel{2.5});
  ASSERT_EQ(w.size(), 8u);
  for (std::size_t k = 0; k + 1 < w.size(); k += 2) {
    EXPECT_EQ(w[k].y, w[k + 1].y);
    EXPECT_EQ(w[k].x < w[k + 1].x, (k / 2) % 2 == 0);
  }
}

TEST(Zigzag, WholeMapCovered) {
  const SensorModel s{2.5};
  for (const GridShape g : {GridShape{37, 23, 1.0}, GridShape{20, 50, 1.0}, GridShape{30, 30, 0.5}}) {
    const auto w = zigzag_waypoints(g, RegionMask{}, s);
    EXPECT_TRUE(sweep_covers(g, RegionMask{}, w, s));
  }
}

TEST(Zigzag, RandomRegionsCovered) {
  const GridShape g{60, 45, 1.0};
  const SensorModel s{2.5};
  std::mt19937_64 rng(44);
  for (int k = 0; k < 20; ++k) {
    std::vector<Vec2> pos;
    for (int i = 0; i < 5; ++i) pos.push_back(oracle::random_point(g, rng));
    const auto lab = partition(pos, g);
    for (std::size_t a = 0; a < pos.size(); ++a) {
      const RegionMask mask{&lab, a};
      if (lab.region_size(a) == 0) continue;
      EXPECT_TRUE(sweep_covers(g, mask, zigzag_waypoints(g, mask, s), s)) << "config " << k << " agent " << a;
    }
  }
}

TEST(Zigzag, EmptyRegionThrows) {
  const GridShape g{10, 10, 1.0};
  VoronoiLabeling lab{g, std::vector<std::uint16_t>(g.cell_count(), 0), {Vec2{1, 1}, Vec2{2, 2}}};
  EXPECT_THROW(zigzag_waypoints(g, RegionMask{&lab, 1}, SensorModel{}), std::invalid_argument);
}

TEST(Zigzag, MemoryAdvancesThroughSweep) {
  const GridShape g{20, 10, 1.0};
  const auto map = ProbabilityMap::uniform(g, 1.0);
  StrategyConfig cfg{StrategyKind::ZigZag};
  AgentMemory mem;
  std::vector<Vec2> goals;
  for (int k = 0; k < 5; ++k) {
    const auto d = next_goal(cfg, AgentState{Vec2{0.2, 0.2}, {}, {}}, map, RegionMask{}, PlannerParams{}, SensorModel{}, mem);
    if (d.goal) goals.push_back(*d.goal);
  }
  EXPECT_EQ(goals.size(), 4u);
  EXPECT_EQ(goals[0], (Vec2{0.5, 2.5}));
}
