#pragma once

// Workspace grid, probability prior, targets, sensor footprint and map depletion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vsearch/geometry.hpp"

namespace vsearch {

/// Nonnegative per-cell probability mass over the workspace. Values only ever decrease.
class ProbabilityMap {
 public:
  ProbabilityMap() = default;

  ProbabilityMap(GridShape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
    if (shape_.cols < 1 || shape_.rows < 1) throw std::invalid_argument("ProbabilityMap: grid must be at least 1x1");
    if (!(shape_.cell_size > 0.0) || !std::isfinite(shape_.cell_size))
      throw std::invalid_argument("ProbabilityMap: cell_size must be positive");
    if (values_.size() != shape_.cell_count())
      throw std::invalid_argument("ProbabilityMap: value count does not match grid size");
    for (double v : values_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("ProbabilityMap: values must be finite and >= 0");
  }

  static ProbabilityMap uniform(GridShape shape, double value) {
    return ProbabilityMap(shape, std::vector<double>(shape.cell_count(), value));
  }

  const GridShape& shape() const { return shape_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double at(const Cell& c) const { return values_[shape_.index(c)]; }

  double total_mass() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }
  bool exhausted() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  void zero(std::size_t idx) { values_[idx] = 0.0; }

  /// Copy with every value multiplied by `factor` (> 0).
  ProbabilityMap scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("ProbabilityMap::scaled: factor must be positive");
    std::vector<double> v = values_;
    for (double& x : v) x *= factor;
    return ProbabilityMap(shape_, std::move(v));
  }

  friend bool operator==(const ProbabilityMap&, const ProbabilityMap&) = default;

 private:
  GridShape shape_{};
  std::vector<double> values_{0.0};
};

class TargetSet {
 public:
  TargetSet() = default;
  explicit TargetSet(std::vector<Vec2> positions)
      : positions_(std::move(positions)), found_(positions_.size(), false) {}

  std::size_t total_count() const { return positions_.size(); }
  std::size_t found_count() const { return found_count_; }
  bool all_found() const { return found_count_ == positions_.size(); }

  std::span<const Vec2> positions() const { return positions_; }
  bool is_found(std::size_t i) const { return found_[i]; }

  /// Returns true if the flag flipped.
  bool mark_found(std::size_t i) {
    if (found_[i]) return false;
    found_[i] = true;
    ++found_count_;
    return true;
  }

  friend bool operator==(const TargetSet&, const TargetSet&) = default;

 private:
  std::vector<Vec2> positions_;
  std::vector<bool> found_;
  std::size_t found_count_{0};
};

/// Square downward footprint of side 2 * half_side.
struct SensorModel {
  double half_side{2.5};

  void validate() const {
    if (!(half_side > 0.0) || !std::isfinite(half_side)) throw std::invalid_argument("SensorModel: half_side must be > 0");
  }
};

/// Occurrence rate as a function of elevation: exp(a - b * |e - e_star|).
struct RateParams {
  double a{0.0};
  double b{12.0};
  double e_star{0.7};

  double rate(double elevation) const { return std::exp(a - b * std::abs(elevation - e_star)); }
};

struct ElevationScenario {
  GridShape shape{};
  std::vector<double> elevation;
  std::uint64_t rng_seed{0};
  std::size_t target_count{0};
  RateParams rate_params{};
};

struct Scenario {
  ProbabilityMap prior;
  TargetSet targets;
  ElevationScenario elevation;
};

namespace detail {

// mt19937_64 output is fully specified by the standard; the distributions are not, so the
// conversions below keep scenarios bit-identical across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

}  // namespace detail

/// Smooth synthetic terrain: a sum of 4-8 raised-cosine bumps evaluated at cell centers.
inline std::vector<double> synthesize_elevation(const GridShape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n_bumps = 4 + static_cast<int>(rng() % 5);
  struct Bump {
    Vec2 center;
    double radius;
    double height;
  };
  const double span = std::min(shape.width_m(), shape.height_m());
  std::vector<Bump> bumps;
  bumps.reserve(static_cast<std::size_t>(n_bumps));
  for (int k = 0; k < n_bumps; ++k) {
    Bump b;
    b.center = Vec2{detail::uniform(rng, 0.0, shape.width_m()), detail::uniform(rng, 0.0, shape.height_m())};
    b.radius = detail::uniform(rng, 0.15, 0.4) * span;
    b.height = detail::uniform(rng, 0.8, 2.2);
    bumps.push_back(b);
  }

  std::vector<double> elevation(shape.cell_count(), 0.0);
  for (std::size_t i = 0; i < elevation.size(); ++i) {
    const Vec2 c = shape.center(i);
    double e = 0.0;
    for (const Bump& b : bumps) {
      const double r = distance(c, b.center) / b.radius;
      if (r < 1.0) e += b.height * 0.5 * (1.0 + std::cos(std::numbers::pi * r));
    }
    elevation[i] = e;
  }
  return elevation;
}

/// Weighted sampling of `n` distinct cells (probability proportional to weight), then a uniform
/// position inside each chosen cell.
inline std::vector<Vec2> sample_targets(const GridShape& shape, std::span<const double> weights, std::size_t n,
                                        std::mt19937_64& rng) {
  std::size_t positive = 0;
  for (double w : weights) positive += w > 0.0 ? 1 : 0;
  if (n > shape.cell_count()) throw std::invalid_argument("n_targets exceeds the number of grid cells");
  if (n > positive) throw std::invalid_argument("n_targets exceeds the number of cells with positive rate");

  // Efraimidis-Spirakis keys: the n largest log(u)/w form a weighted sample without replacement.
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(positive);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double u = detail::unit_uniform(rng);
    if (weights[i] <= 0.0) continue;
    const double key = u > 0.0 ? std::log(u) / weights[i] : -std::numeric_limits<double>::infinity();
    keys.emplace_back(key, i);
  }
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n), keys.end(),
                    [](const auto& l, const auto& r) { return l.first > r.first || (l.first == r.first && l.second < r.second); });

  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Cell c = shape.cell_at(keys[k].second);
    const double fx = detail::unit_uniform(rng);
    const double fy = detail::unit_uniform(rng);
    out.push_back(Vec2{(c.col + fx) * shape.cell_size, (c.row + fy) * shape.cell_size});
  }
  return out;
}

inline std::vector<double> rate_field(std::span<const double> elevation, const RateParams& params) {
  std::vector<double> rates(elevation.size());
  std::transform(elevation.begin(), elevation.end(), rates.begin(), [&](double e) { return params.rate(e); });
  return rates;
}

/// Builds prior and targets from a given elevation field.
inline Scenario scenario_from_elevation(const GridShape& shape, std::vector<double> elevation, std::uint64_t seed,
                                        std::size_t n_targets, const RateParams& params = {}) {
  if (n_targets < 1) throw std::invalid_argument("n_targets must be >= 1");
  if (elevation.size() != shape.cell_count()) throw std::invalid_argument("elevation grid does not match map size");

  std::vector<double> rates = rate_field(elevation, params);
  double total = 0.0;
  for (double r : rates) {
    if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("rate field must be finite and nonnegative");
    total += r;
  }
  if (!(total > 0.0)) throw std::invalid_argument("rate field has no positive mass");

  // Separate stream from the terrain synthesis so target draws do not shift the terrain.
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<Vec2> targets = sample_targets(shape, rates, n_targets, rng);

  std::vector<double> prior(rates.size());
  std::transform(rates.begin(), rates.end(), prior.begin(), [total](double r) { return r / total; });

  ElevationScenario elev{shape, std::move(elevation), seed, n_targets, params};
  return Scenario{ProbabilityMap(shape, std::move(prior)), TargetSet(std::move(targets)), std::move(elev)};
}

inline Scenario generate_scenario(std::uint64_t seed, int width_cells, int height_cells, double cell_size,
                                  std::size_t n_targets, const RateParams& params = {}) {
  if (width_cells < 1 || height_cells < 1) throw std::invalid_argument("grid dimensions must be positive");
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
  const GridShape shape{width_cells, height_cells, cell_size};
  if (n_targets > shape.cell_count())
    throw std::invalid_argument("n_targets (" + std::to_string(n_targets) + ") exceeds cell count (" +
                                std::to_string(shape.cell_count()) + ")");
  return scenario_from_elevation(shape, synthesize_elevation(shape, seed), seed, n_targets, params);
}

/// Generation parameters shared by every seed of an experiment.
struct ScenarioParams {
  int width_cells{100};
  int height_cells{100};
  double cell_size{1.0};
  std::size_t n_targets{20};
  RateParams rate_params{};
};

inline Scenario generate_scenario(std::uint64_t seed, const ScenarioParams& p) {
  return generate_scenario(seed, p.width_cells, p.height_cells, p.cell_size, p.n_targets, p.rate_params);
}

/// Predicate shared by sensing and discovery: cell center inside the footprint square (closed).
inline bool cell_in_footprint(const GridShape& shape, const Cell& c, const Vec2& position, const SensorModel& sensor) {
  const Vec2 ctr = shape.center(c);
  return std::abs(ctr.x - position.x) <= sensor.half_side && std::abs(ctr.y - position.y) <= sensor.half_side;
}

/// Visits every cell whose center lies in the sensor square at `position` (row-major order).
template <typename Visit>
void for_each_sensed_cell(const GridShape& shape, const Vec2& position, const SensorModel& sensor, Visit&& visit) {
  const double cs = shape.cell_size;
  // One extra cell of slack on each side; the exact predicate decides membership.
  const int c0 = std::max(0, static_cast<int>(std::floor((position.x - sensor.half_side) / cs)) - 1);
  const int c1 = std::min(shape.cols - 1, static_cast<int>(std::floor((position.x + sensor.half_side) / cs)) + 1);
  const int r0 = std::max(0, static_cast<int>(std::floor((position.y - sensor.half_side) / cs)) - 1);
  const int r1 = std::min(shape.rows - 1, static_cast<int>(std::floor((position.y + sensor.half_side) / cs)) + 1);
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c)
      if (cell_in_footprint(shape, Cell{c, r}, position, sensor)) visit(shape.index(Cell{c, r}));
}

inline std::vector<std::size_t> sensed_cells(const Vec2& position, const SensorModel& sensor, const ProbabilityMap& map) {
  if (!map.shape().contains(position)) throw std::invalid_argument("sensed_cells: position outside workspace");
  std::vector<std::size_t> out;
  for_each_sensed_cell(map.shape(), position, sensor, [&](std::size_t idx) { out.push_back(idx); });
  return out;
}

/// Sample spacing along a trajectory that leaves no grid cell unsensed between samples.
inline double sweep_interval(double cell_size, const SensorModel& sensor) {
  return std::min(cell_size, sensor.half_side) / 2.0;
}

/// A target is discovered when the cell containing it is sensed from any swept position.
/// Returns the indices of newly discovered targets in ascending order.
inline std::vector<std::size_t> mark_found(TargetSet& targets, const GridShape& shape, std::span<const Vec2> swept,
                                           const SensorModel& sensor) {
  std::vector<std::size_t> newly;
  for (std::size_t i = 0; i < targets.total_count(); ++i) {
    if (targets.is_found(i)) continue;
    const Cell c = shape.cell_of(targets.positions()[i]);
    for (const Vec2& p : swept) {
      if (cell_in_footprint(shape, c, p, sensor)) {
        targets.mark_found(i);
        newly.push_back(i);
        break;
      }
    }
  }
  return newly;
}

inline TargetSet update_found(TargetSet targets, const GridShape& shape, std::span<const Vec2> swept,
                              const SensorModel& sensor) {
  mark_found(targets, shape, swept, sensor);
  return targets;
}

/// Zeroes every cell sensed from any swept position.
inline void deplete_in_place(ProbabilityMap& map, std::span<const Vec2> swept, const SensorModel& sensor) {
  for (const Vec2& p : swept) for_each_sensed_cell(map.shape(), p, sensor, [&](std::size_t idx) { map.zero(idx); });
}

inline ProbabilityMap deplete(ProbabilityMap map, std::span<const Vec2> swept, const SensorModel& sensor) {
  deplete_in_place(map, swept, sensor);
  return map;
}

/// Row-major CSV, one grid row per line, row 0 first.
template <typename T>
void write_grid_csv(std::ostream& os, const GridShape& shape, std::span<const T> values) {
  const auto old_prec = os.precision(17);
  for (int r = 0; r < shape.rows; ++r) {
    for (int c = 0; c < shape.cols; ++c) {
      if (c) os << ',';
      os << values[shape.index(Cell{c, r})];
    }
    os << '\n';
  }
  os.precision(old_prec);
}

}  // namespace vsearch
