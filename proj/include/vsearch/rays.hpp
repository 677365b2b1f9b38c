#pragma once

// Uniform ray fan around an agent with normalized per-ray information gain.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vsearch/geometry.hpp"
#include "vsearch/partition.hpp"
#include "vsearch/world.hpp"

namespace vsearch {

struct RayTrace {
  std::vector<Cell> cells;
  double raw_sum{0.0};
};

struct RayFan {
  Vec2 origin{};
  std::vector<double> angles;
  std::vector<double> raw_sums;
  std::vector<double> gains;

  std::size_t n_rays() const { return angles.size(); }
};

inline double ray_angle(std::size_t j, std::size_t n_rays) {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_rays);
}

namespace detail {

/// Walks the ray until it leaves the grid or hits a cell outside the mask. `visit(idx)` sees every
/// admitted cell. Returns the number of cells visited.
template <typename Visit>
std::size_t walk_ray(const ProbabilityMap& map, const Vec2& origin, double angle, const RegionMask& mask, Visit&& visit) {
  const GridShape& shape = map.shape();
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  const double t_end = exit_parameter(shape, origin, dir);
  std::size_t n = 0;
  walk_supercover(shape, origin, dir, t_end, [&](const Cell& c) {
    const std::size_t idx = shape.index(c);
    if (!mask.admits(idx)) return false;
    visit(idx);
    ++n;
    return true;
  });
  return n;
}

}  // namespace detail

/// Cells crossed by the ray from `origin` at `angle`, up to the map border or the first cell
/// outside `mask`, and the sum of their values.
inline RayTrace cast_ray(const Vec2& origin, double angle, const ProbabilityMap& map, const RegionMask& mask = {}) {
  if (!map.shape().contains(origin) || !is_finite(origin))
    throw std::invalid_argument("cast_ray: origin outside workspace");
  RayTrace out;
  const GridShape& shape = map.shape();
  detail::walk_ray(map, origin, angle, mask, [&](std::size_t idx) {
    out.cells.push_back(shape.cell_at(idx));
    out.raw_sum += map[idx];
  });
  return out;
}

/// Sum-only variant of cast_ray for hot loops. `cells_visited` accumulates the traversal length.
inline double ray_sum(const Vec2& origin, double angle, const ProbabilityMap& map, const RegionMask& mask,
                      std::uint64_t* cells_visited = nullptr) {
  double sum = 0.0;
  const std::size_t n = detail::walk_ray(map, origin, angle, mask, [&](std::size_t idx) { sum += map[idx]; });
  if (cells_visited) *cells_visited += n;
  return sum;
}

inline RayFan compute_fan(const Vec2& origin, std::size_t n_rays, const ProbabilityMap& map, const RegionMask& mask = {},
                          std::uint64_t* cells_visited = nullptr) {
  if (n_rays < 2) throw std::invalid_argument("compute_fan: n_rays must be >= 2");
  if (!map.shape().contains(origin) || !is_finite(origin))
    throw std::invalid_argument("compute_fan: origin outside workspace");
  RayFan fan;
  fan.origin = origin;
  fan.angles.resize(n_rays);
  fan.raw_sums.resize(n_rays);
  fan.gains.assign(n_rays, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < n_rays; ++j) {
    fan.angles[j] = ray_angle(j, n_rays);
    fan.raw_sums[j] = ray_sum(origin, fan.angles[j], map, mask, cells_visited);
    total += fan.raw_sums[j];
  }
  if (total > 0.0)
    for (std::size_t j = 0; j < n_rays; ++j) fan.gains[j] = fan.raw_sums[j] / total;
  return fan;
}

/// The `n_actions` highest-gain angles, best first; equal gains keep the smaller angle first.
/// Rays with zero gain are never returned.
inline std::vector<double> top_directions(const RayFan& fan, std::size_t n_actions) {
  if (n_actions < 1 || n_actions > fan.n_rays()) throw std::invalid_argument("top_directions: n_actions out of range");
  std::vector<std::size_t> order;
  order.reserve(fan.n_rays());
  for (std::size_t j = 0; j < fan.n_rays(); ++j)
    if (fan.gains[j] > 0.0) order.push_back(j);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fan.gains[a] > fan.gains[b]; });
  if (order.size() > n_actions) order.resize(n_actions);
  std::vector<double> out;
  out.reserve(order.size());
  for (std::size_t j : order) out.push_back(fan.angles[j]);
  return out;
}

}  // namespace vsearch
