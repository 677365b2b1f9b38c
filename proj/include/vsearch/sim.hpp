#pragma once

// Synchronous multi-agent search loop and batch execution.
//
// Every round: agents sense at their current positions, the workspace is re-partitioned, each
// agent picks a goal against the same start-of-round snapshot and flies a stopping quintic to it.
// The round lasts as long as the slowest trajectory; discovery and depletion are applied once all
// trajectories are swept.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "vsearch/geometry.hpp"
#include "vsearch/partition.hpp"
#include "vsearch/planner.hpp"
#include "vsearch/strategies.hpp"
#include "vsearch/trajectory.hpp"
#include "vsearch/world.hpp"

namespace vsearch {

struct SimConfig {
  std::size_t n_agents{1};
  StrategyConfig strategy{};
  PlannerParams planner{};
  SensorModel sensor{};
  KinoLimits limits{};
  int max_rounds{5000};
  bool use_voronoi{true};
  std::uint64_t rng_seed{0};
  /// Overrides the seeded random placement when non-empty.
  std::vector<Vec2> initial_positions;

  void validate() const {
    if (n_agents < 1) throw std::invalid_argument("SimConfig: n_agents must be >= 1");
    if (max_rounds < 1) throw std::invalid_argument("SimConfig: max_rounds must be >= 1");
    if (!initial_positions.empty() && initial_positions.size() != n_agents)
      throw std::invalid_argument("SimConfig: initial_positions size must equal n_agents");
    strategy.validate();
    planner.validate();
    sensor.validate();
    limits.validate();
  }

  /// Whether agents search inside Voronoi regions. The sweep baseline always splits the map.
  bool partitioned() const {
    return n_agents > 1 && (use_voronoi || strategy.kind == StrategyKind::ZigZag);
  }
};

enum class Termination { AllFound, MapExhausted, MaxRounds, Stalled };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::AllFound: return "all_found";
    case Termination::MapExhausted: return "map_exhausted";
    case Termination::MaxRounds: return "max_rounds";
    case Termination::Stalled: return "stalled";
  }
  return "?";
}

struct FoundEvent {
  double time{0.0};        // simulated seconds
  double path_length{0.0};  // summed over agents at that instant
  std::size_t found{0};     // cumulative
};

struct RunMetrics {
  std::vector<double> path_length;
  std::vector<double> flight_time;
  double working_time{0.0};
  std::vector<FoundEvent> found_timeline;
  std::vector<double> plan_compute_time;  // per round, summed over agents
  std::size_t plan_calls{0};
  double plan_time_total{0.0};
  std::uint64_t plan_cells_total{0};
  int rounds_executed{0};
  std::size_t targets_total{0};
  std::size_t targets_found{0};
  bool success{false};
  Termination termination{Termination::MaxRounds};

  double max_path_length() const {
    return path_length.empty() ? 0.0 : *std::max_element(path_length.begin(), path_length.end());
  }
  double total_path_length() const {
    double s = 0.0;
    for (double p : path_length) s += p;
    return s;
  }
  double mean_plan_time() const { return plan_calls ? plan_time_total / static_cast<double>(plan_calls) : 0.0; }
  double mean_plan_cells() const {
    return plan_calls ? static_cast<double>(plan_cells_total) / static_cast<double>(plan_calls) : 0.0;
  }

  /// Summed path length when `count` targets had been found; nullopt if never reached.
  std::optional<double> path_at_found(std::size_t count) const {
    for (const FoundEvent& e : found_timeline)
      if (e.found >= count) return e.path_length;
    return std::nullopt;
  }
  std::optional<double> time_at_found(std::size_t count) const {
    for (const FoundEvent& e : found_timeline)
      if (e.found >= count) return e.time;
    return std::nullopt;
  }
};

struct RoundTrace {
  double start_time{0.0};
  std::vector<Vec2> positions;
  std::vector<std::optional<QuinticTrajectory>> trajectories;
  std::vector<std::optional<LookaheadPlan>> plans;
  std::optional<VoronoiLabeling> labeling;
};

/// Replay record of one run. Partition snapshots are kept every `partition_every` rounds.
struct RunTrace {
  int partition_every{10};
  bool keep_plans{false};
  std::vector<RoundTrace> rounds;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct SweepSample {
  Vec2 position;
  double time;
  double arc;  // polyline length from the trajectory start
};

inline std::vector<SweepSample> sample_sweep(const QuinticTrajectory& traj, double interval, double speed_bound) {
  const int n = std::max(1, static_cast<int>(std::ceil(traj.duration * speed_bound / interval)));
  std::vector<SweepSample> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = k == n ? traj.duration : traj.duration * k / n;
    const Vec2 p = eval(traj, t).position;
    const double arc = out.empty() ? 0.0 : out.back().arc + distance(out.back().position, p);
    out.push_back({p, t, arc});
  }
  return out;
}

inline double arc_at(const std::vector<SweepSample>& s, double t) {
  if (s.empty()) return 0.0;
  if (t >= s.back().time) return s.back().arc;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].time >= t) {
      const double span = s[k].time - s[k - 1].time;
      const double f = span > 0.0 ? (t - s[k - 1].time) / span : 1.0;
      return s[k - 1].arc + f * (s[k].arc - s[k - 1].arc);
    }
  }
  return s.back().arc;
}

inline std::vector<Vec2> initial_positions(const SimConfig& config, const GridShape& shape) {
  if (!config.initial_positions.empty()) {
    for (const Vec2& p : config.initial_positions)
      if (!shape.contains(p)) throw std::invalid_argument("SimConfig: initial position outside workspace");
    return config.initial_positions;
  }
  std::mt19937_64 rng(config.rng_seed ^ 0xA0761D6478BD642FULL);
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < config.n_agents; ++i)
    out.push_back(Vec2{uniform(rng, 0.0, shape.width_m()), uniform(rng, 0.0, shape.height_m())});
  return out;
}

}  // namespace detail

inline RunMetrics run(const ProbabilityMap& prior, const TargetSet& initial_targets, SimConfig config,
                      RunTrace* trace = nullptr) {
  config.validate();
  config.planner.limits = config.limits;
  const GridShape& shape = prior.shape();

  ProbabilityMap map = prior;
  TargetSet targets = initial_targets;
  const std::size_t n = config.n_agents;

  std::vector<AgentState> states(n);
  {
    const auto init = detail::initial_positions(config, shape);
    for (std::size_t i = 0; i < n; ++i) states[i].position = init[i];
  }
  std::vector<AgentMemory> memory(n);
  std::optional<VoronoiLabeling> frozen;

  RunMetrics m;
  m.path_length.assign(n, 0.0);
  m.flight_time.assign(n, 0.0);
  m.targets_total = targets.total_count();

  const double interval = sweep_interval(shape.cell_size, config.sensor);
  const double speed_bound = 1.05 * config.limits.v_max;
  double now = 0.0;

  auto record_found = [&](double t, double path) {
    if (m.found_timeline.empty() || m.found_timeline.back().found != targets.found_count())
      m.found_timeline.push_back({t, path, targets.found_count()});
  };

  for (;;) {
    if (m.rounds_executed >= config.max_rounds) {
      m.termination = Termination::MaxRounds;
      break;
    }
    ++m.rounds_executed;

    // Sense where the agents stand (only new information in the first round).
    {
      std::vector<Vec2> here;
      for (const auto& s : states) here.push_back(s.position);
      mark_found(targets, shape, here, config.sensor);
      deplete_in_place(map, here, config.sensor);
      record_found(now, m.total_path_length());
    }
    if (targets.all_found()) {
      m.termination = Termination::AllFound;
      break;
    }
    if (map.exhausted()) {
      m.termination = Termination::MapExhausted;
      break;
    }

    std::vector<Vec2> positions;
    for (const auto& s : states) positions.push_back(s.position);
    if (config.partitioned() && config.strategy.kind == StrategyKind::ZigZag && !frozen)
      frozen = partition(positions, shape);

    RoundTrace round_trace;
    if (trace) {
      round_trace.start_time = now;
      round_trace.positions = positions;
    }
    const bool snapshot = trace && trace->partition_every > 0 && (m.rounds_executed - 1) % trace->partition_every == 0;

    // Each agent decides on its own from the shared positions: it derives its region, picks a
    // goal and generates its trajectory. That whole step is what gets timed.
    std::vector<std::optional<QuinticTrajectory>> trajs(n);
    double round_plan_time = 0.0;
    bool any_goal = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      std::optional<VoronoiLabeling> own;
      const VoronoiLabeling* region = nullptr;
      if (config.partitioned()) {
        if (frozen) {
          region = &*frozen;
        } else {
          own = partition(positions, shape);
          region = &*own;
        }
      }
      const RegionMask mask = region ? RegionMask{region, i} : RegionMask{};
      GoalDecision d = next_goal(config.strategy, states[i], map, mask, config.planner, config.sensor, memory[i]);
      if (d.goal) {
        const Vec2 goal = shape.clamp(*d.goal);
        const double min_duration =
            std::max(config.planner.step_time, distance(goal, states[i].position) / config.limits.v_max);
        try {
          trajs[i] = generate_feasible(states[i], goal, min_duration, config.limits);
        } catch (const InfeasibleTrajectory& e) {
          throw SimulationError("round " + std::to_string(m.rounds_executed) + ", agent " + std::to_string(i) + ": " +
                                e.what());
        }
        any_goal = true;
      }
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      round_plan_time += dt;
      m.plan_time_total += dt;
      m.plan_cells_total += d.stats.cells_visited;
      ++m.plan_calls;
      if (trace) {
        if (trace->keep_plans) round_trace.plans.push_back(std::move(d.plan));
        if (snapshot && region && i == 0) round_trace.labeling = *region;
      }
    }
    m.plan_compute_time.push_back(round_plan_time);

    if (!any_goal) {
      m.termination = Termination::Stalled;
      if (trace) trace->rounds.push_back(std::move(round_trace));
      break;
    }

    double round_duration = 0.0;
    std::vector<std::vector<detail::SweepSample>> sweeps(n);
    std::vector<Vec2> swept;
    const std::vector<double> path_before = m.path_length;
    for (std::size_t i = 0; i < n; ++i) {
      if (!trajs[i]) continue;
      const QuinticTrajectory& tr = *trajs[i];
      round_duration = std::max(round_duration, tr.duration);
      sweeps[i] = detail::sample_sweep(tr, interval, speed_bound);
      for (const auto& s : sweeps[i]) swept.push_back(s.position);
      m.path_length[i] += arc_length(tr);
      m.flight_time[i] += tr.duration;
      states[i] = AgentState{shape.clamp(eval(tr, tr.duration).position), Vec2{}, Vec2{}};
    }

    // Discovery time of each newly found target is the earliest sample that senses its cell.
    std::vector<double> found_times;
    for (std::size_t k = 0; k < targets.total_count(); ++k) {
      if (targets.is_found(k)) continue;
      const Cell c = shape.cell_of(targets.positions()[k]);
      double first = std::numeric_limits<double>::infinity();
      for (const auto& sw : sweeps)
        for (const auto& s : sw)
          if (s.time < first && cell_in_footprint(shape, c, s.position, config.sensor)) {
            first = s.time;
            break;
          }
      if (std::isfinite(first)) {
        targets.mark_found(k);
        found_times.push_back(first);
      }
    }
    std::sort(found_times.begin(), found_times.end());
    for (std::size_t k = 0; k < found_times.size(); ++k) {
      const double t = found_times[k];
      double path = 0.0;
      for (std::size_t i = 0; i < n; ++i) path += path_before[i] + detail::arc_at(sweeps[i], t);
      const std::size_t count = targets.found_count() - found_times.size() + k + 1;
      m.found_timeline.push_back({now + t, path, count});
    }
    deplete_in_place(map, swept, config.sensor);

    if (trace) {
      round_trace.trajectories = std::move(trajs);
      trace->rounds.push_back(std::move(round_trace));
    }
    now += round_duration;
  }

  m.targets_found = targets.found_count();
  m.success = targets.all_found();
  m.working_time = n ? *std::max_element(m.flight_time.begin(), m.flight_time.end()) : 0.0;
  return m;
}

inline RunMetrics run(const Scenario& scenario, const SimConfig& config, RunTrace* trace = nullptr) {
  return run(scenario.prior, scenario.targets, config, trace);
}

struct BatchRow {
  std::uint64_t seed{0};
  std::size_t config_index{0};
  std::optional<RunMetrics> metrics;
  std::optional<RunTrace> trace;
  std::string error;
};

/// Runs every (seed, config) pair on worker threads. Rows come back seed-major in input order.
/// Each config's placement seed is replaced by the scenario seed so all configs of one seed start
/// from the same positions. When `trace_options` is given every row also records a RunTrace
/// configured like it.
inline std::vector<BatchRow> run_batch(const std::vector<std::uint64_t>& seeds, const std::vector<SimConfig>& configs,
                                       const ScenarioParams& scenario_params, unsigned jobs = 1,
                                       const RunTrace* trace_options = nullptr) {
  if (seeds.empty() || configs.empty()) throw std::invalid_argument("run_batch: seeds and configs must be non-empty");
  std::vector<BatchRow> rows(seeds.size() * configs.size());
  for (std::size_t s = 0; s < seeds.size(); ++s)
    for (std::size_t c = 0; c < configs.size(); ++c) rows[s * configs.size() + c] = BatchRow{seeds[s], c, {}, {}, {}};

  std::vector<std::optional<Scenario>> scenarios(seeds.size());
  std::vector<std::string> scenario_errors(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    try {
      scenarios[s] = generate_scenario(seeds[s], scenario_params);
    } catch (const std::exception& e) {
      scenario_errors[s] = e.what();
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      BatchRow& row = rows[k];
      const std::size_t s = k / configs.size();
      if (!scenarios[s]) {
        row.error = scenario_errors[s];
        continue;
      }
      try {
        SimConfig cfg = configs[row.config_index];
        cfg.rng_seed = row.seed;
        if (trace_options) {
          RunTrace t{trace_options->partition_every, trace_options->keep_plans, {}};
          row.metrics = run(*scenarios[s], cfg, &t);
          row.trace = std::move(t);
        } else {
          row.metrics = run(*scenarios[s], cfg);
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

}  // namespace vsearch
