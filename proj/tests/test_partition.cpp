#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"

using namespace vsearch;

TEST(Partition, SingleAgentOwnsEverything) {
  const GridShape g{13, 9, 1.0};
  const std::vector<Vec2> pos{Vec2{2.0, 3.0}};
  const auto lab = partition(pos, g);
  for (auto l : lab.labels) EXPECT_EQ(l, 0);
  EXPECT_EQ(lab.region_size(0), g.cell_count());
}

TEST(Partition, MirrorAgentsSplitAtMidline) {
  const GridShape g{11, 6, 1.0};
  // Index 0 on the right so the midline tie rule is visible.
  const std::vector<Vec2> pos{Vec2{8.5, 3.0}, Vec2{2.5, 3.0}};
  const auto lab = partition(pos, g);
  for (std::size_t idx = 0; idx < g.cell_count(); ++idx) {
    const int col = g.cell_at(idx).col;
    EXPECT_EQ(lab.labels[idx], col < 5 ? 1 : 0) << "col " << col;
  }
}

TEST(Partition, RandomConfigurationsMatchNearestNeighbour) {
  const GridShape g{50, 50, 1.0};
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    std::vector<Vec2> pos;
    for (int i = 0; i < 5; ++i) pos.push_back(oracle::random_point(g, rng));
    EXPECT_EQ(partition(pos, g).labels, oracle::nearest_labels(g, pos));
  }
}

TEST(Partition, PermutationRelabelsConsistently) {
  const GridShape g{30, 20, 1.0};
  std::mt19937_64 rng(32);
  std::vector<Vec2> pos;
  for (int i = 0; i < 6; ++i) pos.push_back(oracle::random_point(g, rng));
  std::vector<std::size_t> perm(pos.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vec2> permuted(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) permuted[perm[i]] = pos[i];
  const auto a = partition(pos, g), b = partition(permuted, g);
  for (std::size_t idx = 0; idx < g.cell_count(); ++idx) EXPECT_EQ(b.labels[idx], perm[a.labels[idx]]);
}

TEST(Partition, OwnCellBelongsToAgent) {
  const GridShape g{40, 40, 0.5};
  std::mt19937_64 rng(33);
  std::vector<Vec2> pos;
  for (int i = 0; i < 8; ++i) pos.push_back(g.center(g.cell_of(oracle::random_point(g, rng))));
  const auto lab = partition(pos, g);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    bool coincident_lower = false;
    for (std::size_t j = 0; j < i; ++j) coincident_lower = coincident_lower || pos[j] == pos[i];
    if (!coincident_lower) EXPECT_EQ(lab.label(g.cell_of(pos[i])), i);
  }
}

TEST(Partition, CoverAndDisjoint) {
  const GridShape g{25, 35, 1.0};
  std::mt19937_64 rng(34);
  std::vector<Vec2> pos;
  for (int i = 0; i < 7; ++i) pos.push_back(oracle::random_point(g, rng));
  const auto lab = partition(pos, g);
  ASSERT_EQ(lab.labels.size(), g.cell_count());
  std::size_t total = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) total += lab.region_size(i);
  EXPECT_EQ(total, g.cell_count());
  for (auto l : lab.labels) EXPECT_LT(l, pos.size());
}

TEST(Partition, RejectsBadInput) {
  const GridShape g{5, 5, 1.0};
  EXPECT_THROW(partition(std::vector<Vec2>{}, g), std::invalid_argument);
  EXPECT_THROW(partition(std::vector<Vec2>{Vec2{6.0, 1.0}}, g), std::invalid_argument);
}

TEST(GlobalMaxima, DepletedRegionIsAbsent) {
  const GridShape g{10, 10, 1.0};
  std::vector<double> v(g.cell_count(), 0.0);
  v[g.index(Cell{9, 9})] = 1.0;
  const std::vector<Vec2> pos{Vec2{1, 1}, Vec2{9, 9}};
  const auto lab = partition(pos, g);
  EXPECT_FALSE(global_maxima(lab, 0, ProbabilityMap(g, v)).has_value());
  EXPECT_EQ(global_maxima(lab, 1, ProbabilityMap(g, v)), (Vec2{9.5, 9.5}));
}

TEST(GlobalMaxima, SinglePositiveCell) {
  const GridShape g{10, 10, 2.0};
  std::vector<double> v(g.cell_count(), 0.0);
  v[g.index(Cell{3, 7})] = 1e-9;
  const std::vector<Vec2> pos{Vec2{1, 1}};
  EXPECT_EQ(global_maxima(partition(pos, g), 0, ProbabilityMap(g, v)), (Vec2{7.0, 15.0}));
}

TEST(GlobalMaxima, MatchesLinearScan) {
  const GridShape g{40, 30, 1.0};
  std::mt19937_64 rng(35);
  for (int k = 0; k < 20; ++k) {
    const auto map = oracle::random_map(g, rng, 0.2);
    std::vector<Vec2> pos;
    for (int i = 0; i < 3; ++i) pos.push_back(oracle::random_point(g, rng));
    const auto lab = partition(pos, g);
    for (std::size_t a = 0; a < 3; ++a) {
      std::optional<std::size_t> best;
      for (std::size_t idx = 0; idx < g.cell_count(); ++idx)
        if (lab.labels[idx] == a && map[idx] > 0.0 && (!best || map[idx] > map[*best])) best = idx;
      const auto got = global_maxima(lab, a, map);
      ASSERT_EQ(got.has_value(), best.has_value());
      if (best) EXPECT_EQ(*got, g.center(*best));
    }
  }
}

TEST(GlobalMaxima, AgentOutOfRangeThrows) {
  const GridShape g{5, 5, 1.0};
  const std::vector<Vec2> pos{Vec2{1, 1}};
  EXPECT_THROW(global_maxima(partition(pos, g), 1, ProbabilityMap::uniform(g, 1.0)), std::invalid_argument);
}
