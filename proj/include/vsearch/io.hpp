#pragma once

// JSON scenario/experiment files, CSV summaries and run traces.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vsearch/planner.hpp"
#include "vsearch/sim.hpp"
#include "vsearch/strategies.hpp"
#include "vsearch/trajectory.hpp"
#include "vsearch/world.hpp"

namespace vsearch {

using json = nlohmann::json;

/// Malformed scenario or experiment file. The message names the offending field.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void reject_unknown(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw SpecError(std::string(where) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw SpecError(std::string(where) + "." + it.key() + ": unknown field");
  }
}

template <typename T>
T get_field(const json& j, std::string_view where, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SpecError(std::string(where) + "." + key + ": missing or wrong type");
  }
}

template <typename T>
T get_field_or(const json& j, std::string_view where, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return get_field<T>(j, where, key);
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json point(const Vec2& p) { return json::array({p.x, p.y}); }

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Scenario files

struct ScenarioFile {
  std::uint64_t seed{0};
  ScenarioParams params{};
};

inline json scenario_params_to_json(const ScenarioParams& p) {
  return json{{"width_cells", p.width_cells},
              {"height_cells", p.height_cells},
              {"cell_size_m", p.cell_size},
              {"n_targets", p.n_targets},
              {"rate_params", {{"a", p.rate_params.a}, {"b", p.rate_params.b}, {"e_star", p.rate_params.e_star}}}};
}

inline ScenarioParams scenario_params_from_json(const json& j, std::string_view where, bool allow_seed) {
  if (allow_seed)
    detail::reject_unknown(j, where, {"seed", "width_cells", "height_cells", "cell_size_m", "n_targets", "rate_params"});
  else
    detail::reject_unknown(j, where, {"width_cells", "height_cells", "cell_size_m", "n_targets", "rate_params"});
  ScenarioParams p;
  p.width_cells = detail::get_field<int>(j, where, "width_cells");
  p.height_cells = detail::get_field<int>(j, where, "height_cells");
  p.cell_size = detail::get_field<double>(j, where, "cell_size_m");
  p.n_targets = detail::get_field<std::size_t>(j, where, "n_targets");
  if (p.width_cells < 1) throw SpecError(std::string(where) + ".width_cells: must be >= 1");
  if (p.height_cells < 1) throw SpecError(std::string(where) + ".height_cells: must be >= 1");
  if (!(p.cell_size > 0.0)) throw SpecError(std::string(where) + ".cell_size_m: must be > 0");
  if (p.n_targets < 1) throw SpecError(std::string(where) + ".n_targets: must be >= 1");
  if (j.contains("rate_params")) {
    const json& r = j.at("rate_params");
    const std::string rw = std::string(where) + ".rate_params";
    detail::reject_unknown(r, rw, {"a", "b", "e_star"});
    p.rate_params.a = detail::get_field<double>(r, rw, "a");
    p.rate_params.b = detail::get_field<double>(r, rw, "b");
    p.rate_params.e_star = detail::get_field<double>(r, rw, "e_star");
  }
  return p;
}

inline json scenario_to_json(const ScenarioFile& s) {
  json j = scenario_params_to_json(s.params);
  j["seed"] = s.seed;
  return j;
}

inline ScenarioFile scenario_from_json(const json& j) {
  ScenarioFile s;
  s.seed = detail::get_field<std::uint64_t>(j, "scenario", "seed");
  s.params = scenario_params_from_json(j, "scenario", true);
  return s;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------------------------
// Trajectories and plans

inline json trajectory_to_json(const QuinticTrajectory& t) {
  return json{{"coeffs_x", t.coeffs_x}, {"coeffs_y", t.coeffs_y}, {"duration_s", t.duration}};
}

inline QuinticTrajectory trajectory_from_json(const json& j) {
  detail::reject_unknown(j, "trajectory", {"coeffs_x", "coeffs_y", "duration_s"});
  QuinticTrajectory t;
  t.coeffs_x = detail::get_field<std::array<double, 6>>(j, "trajectory", "coeffs_x");
  t.coeffs_y = detail::get_field<std::array<double, 6>>(j, "trajectory", "coeffs_y");
  t.duration = detail::get_field<double>(j, "trajectory", "duration_s");
  if (!(t.duration > 0.0)) throw SpecError("trajectory.duration_s: must be > 0");
  return t;
}

inline json plan_to_json(const LookaheadPlan& p) {
  json wp = json::array();
  for (const Vec2& w : p.waypoints) wp.push_back(detail::point(w));
  return json{{"waypoints", wp}, {"actions", p.actions}, {"rewards", p.rewards}, {"total_reward", p.total_reward}};
}

// ---------------------------------------------------------------------------------------------
// Strategy names

struct StrategyChoice {
  StrategyKind kind{StrategyKind::Proposed};
  bool use_voronoi{true};
};

inline const std::vector<std::string>& valid_strategy_names() {
  static const std::vector<std::string> names{"zigzag", "gm", "lm", "hlm", "proposed",
                                              "voronoi+gm", "voronoi+lm", "voronoi+hlm"};
  return names;
}

inline std::optional<StrategyChoice> parse_strategy(std::string_view name) {
  if (name == "zigzag") return StrategyChoice{StrategyKind::ZigZag, true};
  if (name == "proposed") return StrategyChoice{StrategyKind::Proposed, true};
  if (name == "gm") return StrategyChoice{StrategyKind::GlobalMaxima, false};
  if (name == "lm") return StrategyChoice{StrategyKind::LocalMaxima, false};
  if (name == "hlm") return StrategyChoice{StrategyKind::HeuristicLocalMaxima, false};
  if (name == "voronoi+gm") return StrategyChoice{StrategyKind::GlobalMaxima, true};
  if (name == "voronoi+lm") return StrategyChoice{StrategyKind::LocalMaxima, true};
  if (name == "voronoi+hlm") return StrategyChoice{StrategyKind::HeuristicLocalMaxima, true};
  return std::nullopt;
}

inline std::string valid_strategy_list() {
  std::string s;
  for (const auto& n : valid_strategy_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

// ---------------------------------------------------------------------------------------------
// Experiment specs

struct ExperimentSpec {
  ScenarioParams scenario{};
  std::vector<std::string> strategies;
  std::vector<std::size_t> n_agents{1};
  std::vector<std::uint64_t> seeds;
  SimConfig base{};
  std::string output_dir;
  bool traces{true};
  int partition_every{10};

  /// One SimConfig per (strategy, n_agents) pair, strategy-major.
  struct Variant {
    std::string strategy;
    SimConfig config;
  };
  std::vector<Variant> variants() const {
    std::vector<Variant> out;
    for (const auto& name : strategies) {
      const auto choice = parse_strategy(name);
      for (std::size_t n : n_agents) {
        SimConfig c = base;
        c.strategy.kind = choice->kind;
        c.use_voronoi = choice->use_voronoi;
        c.n_agents = n;
        out.push_back({name, c});
      }
    }
    return out;
  }
};

/// Parses an experiment spec. Relative `scenario_file` paths resolve against `base_dir`.
inline ExperimentSpec experiment_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  detail::reject_unknown(j, "spec",
                         {"scenario", "scenario_file", "strategies", "n_agents", "seeds", "planner", "limits",
                          "sensor_half_side", "local_radius", "radius_growth", "max_rounds", "output_dir", "traces",
                          "partition_every"});
  ExperimentSpec spec;

  std::optional<std::uint64_t> file_seed;
  if (j.contains("scenario") && j.contains("scenario_file"))
    throw SpecError("spec.scenario_file: give either scenario or scenario_file, not both");
  if (j.contains("scenario")) {
    spec.scenario = scenario_params_from_json(j.at("scenario"), "spec.scenario", false);
  } else if (j.contains("scenario_file")) {
    std::filesystem::path p = detail::get_field<std::string>(j, "spec", "scenario_file");
    if (p.is_relative()) p = base_dir / p;
    const ScenarioFile sf = scenario_from_json(read_json_file(p));
    spec.scenario = sf.params;
    file_seed = sf.seed;
  }

  spec.strategies = detail::get_field<std::vector<std::string>>(j, "spec", "strategies");
  if (spec.strategies.empty()) throw SpecError("spec.strategies: at least one strategy required");
  for (const auto& s : spec.strategies)
    if (!parse_strategy(s))
      throw SpecError("spec.strategies: unknown strategy '" + s + "' (valid: " + valid_strategy_list() + ")");

  spec.n_agents = detail::get_field_or<std::vector<std::size_t>>(j, "spec", "n_agents", {1});
  if (spec.n_agents.empty()) throw SpecError("spec.n_agents: at least one value required");
  for (std::size_t n : spec.n_agents)
    if (n < 1) throw SpecError("spec.n_agents: values must be >= 1");

  if (j.contains("seeds")) {
    spec.seeds = detail::get_field<std::vector<std::uint64_t>>(j, "spec", "seeds");
  } else if (file_seed) {
    spec.seeds = {*file_seed};
  }
  if (spec.seeds.empty()) throw SpecError("spec.seeds: at least one seed required");

  SimConfig& c = spec.base;
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    detail::reject_unknown(p, "spec.planner", {"n_steps", "step_time", "n_rays", "n_actions", "discount"});
    c.planner.n_steps = detail::get_field_or<int>(p, "spec.planner", "n_steps", c.planner.n_steps);
    c.planner.step_time = detail::get_field_or<double>(p, "spec.planner", "step_time", c.planner.step_time);
    c.planner.n_rays = detail::get_field_or<std::size_t>(p, "spec.planner", "n_rays", c.planner.n_rays);
    c.planner.n_actions = detail::get_field_or<std::size_t>(p, "spec.planner", "n_actions", c.planner.n_actions);
    c.planner.discount = detail::get_field_or<double>(p, "spec.planner", "discount", c.planner.discount);
  }
  if (j.contains("limits")) {
    const json& l = j.at("limits");
    detail::reject_unknown(l, "spec.limits", {"v_max", "a_max"});
    c.limits.v_max = detail::get_field_or<double>(l, "spec.limits", "v_max", c.limits.v_max);
    c.limits.a_max = detail::get_field_or<double>(l, "spec.limits", "a_max", c.limits.a_max);
  }
  c.sensor.half_side = detail::get_field_or<double>(j, "spec", "sensor_half_side", c.sensor.half_side);
  c.strategy.local_radius = detail::get_field_or<double>(j, "spec", "local_radius", c.strategy.local_radius);
  c.strategy.radius_growth = detail::get_field_or<double>(j, "spec", "radius_growth", c.strategy.radius_growth);
  c.max_rounds = detail::get_field_or<int>(j, "spec", "max_rounds", c.max_rounds);
  spec.output_dir = detail::get_field_or<std::string>(j, "spec", "output_dir", "");
  spec.traces = detail::get_field_or<bool>(j, "spec", "traces", spec.traces);
  spec.partition_every = detail::get_field_or<int>(j, "spec", "partition_every", spec.partition_every);
  c.planner.limits = c.limits;

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("spec: ") + e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------------------------------
// Summary CSV

inline constexpr std::string_view kSummaryHeader =
    "seed,strategy,n_agents,status,success,targets_total,targets_found,rounds,termination,working_time_s,"
    "max_path_m,total_path_m,path_lengths_m,flight_times_s,time_to_half_s,path_to_half_m,mean_plan_cells,error";

struct SummaryRow {
  std::uint64_t seed{0};
  std::string strategy;
  std::size_t n_agents{1};
  std::string status;  // "ok" or "failed"
  bool success{false};
  std::size_t targets_total{0};
  std::size_t targets_found{0};
  int rounds{0};
  std::string termination;
  double working_time_s{0.0};
  double max_path_m{0.0};
  double total_path_m{0.0};
  std::vector<double> path_lengths_m;
  std::vector<double> flight_times_s;
  std::optional<double> time_to_half_s;
  std::optional<double> path_to_half_m;
  double mean_plan_cells{0.0};
  std::string error;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

inline SummaryRow make_summary_row(std::uint64_t seed, const std::string& strategy, std::size_t n_agents,
                                   const std::optional<RunMetrics>& m, const std::string& error) {
  SummaryRow r;
  r.seed = seed;
  r.strategy = strategy;
  r.n_agents = n_agents;
  if (!m) {
    r.status = "failed";
    r.error = error;
    return r;
  }
  r.status = "ok";
  r.success = m->success;
  r.targets_total = m->targets_total;
  r.targets_found = m->targets_found;
  r.rounds = m->rounds_executed;
  r.termination = std::string(to_string(m->termination));
  r.working_time_s = m->working_time;
  r.max_path_m = m->max_path_length();
  r.total_path_m = m->total_path_length();
  r.path_lengths_m = m->path_length;
  r.flight_times_s = m->flight_time;
  const std::size_t half = (m->targets_total + 1) / 2;
  r.time_to_half_s = m->time_at_found(half);
  r.path_to_half_m = m->path_at_found(half);
  r.mean_plan_cells = m->mean_plan_cells();
  return r;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + fmt_double(v[i]);
  return s;
}

inline std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace detail

inline std::string summary_csv_line(const SummaryRow& r) {
  using detail::fmt_double;
  std::string s;
  s += std::to_string(r.seed) + ',' + detail::csv_escape(r.strategy) + ',' + std::to_string(r.n_agents) + ',' +
       r.status + ',' + (r.success ? "1" : "0") + ',' + std::to_string(r.targets_total) + ',' +
       std::to_string(r.targets_found) + ',' + std::to_string(r.rounds) + ',' + r.termination + ',' +
       fmt_double(r.working_time_s) + ',' + fmt_double(r.max_path_m) + ',' + fmt_double(r.total_path_m) + ',' +
       detail::join_doubles(r.path_lengths_m) + ',' + detail::join_doubles(r.flight_times_s) + ',' +
       (r.time_to_half_s ? fmt_double(*r.time_to_half_s) : "") + ',' +
       (r.path_to_half_m ? fmt_double(*r.path_to_half_m) : "") + ',' + fmt_double(r.mean_plan_cells) + ',' +
       detail::csv_escape(r.error);
  return s;
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& r : rows) os << summary_csv_line(r) << '\n';
}

inline std::vector<SummaryRow> parse_summary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSummaryHeader) throw SpecError("summary.csv: unexpected header");
  std::vector<SummaryRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 18) throw SpecError("summary.csv: expected 18 fields, got " + std::to_string(f.size()));
    SummaryRow r;
    r.seed = std::stoull(f[0]);
    r.strategy = f[1];
    r.n_agents = std::stoul(f[2]);
    r.status = f[3];
    r.success = f[4] == "1";
    r.targets_total = std::stoul(f[5]);
    r.targets_found = std::stoul(f[6]);
    r.rounds = std::stoi(f[7]);
    r.termination = f[8];
    r.working_time_s = std::stod(f[9]);
    r.max_path_m = std::stod(f[10]);
    r.total_path_m = std::stod(f[11]);
    r.path_lengths_m = detail::split_doubles(f[12]);
    r.flight_times_s = detail::split_doubles(f[13]);
    if (!f[14].empty()) r.time_to_half_s = std::stod(f[14]);
    if (!f[15].empty()) r.path_to_half_m = std::stod(f[15]);
    r.mean_plan_cells = std::stod(f[16]);
    r.error = f[17];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline constexpr std::string_view kTimingHeader = "seed,strategy,n_agents,plan_calls,mean_plan_time_s";

// ---------------------------------------------------------------------------------------------
// Run traces

inline json run_trace_to_json(std::uint64_t seed, const std::string& strategy, const Scenario& scenario,
                              const SimConfig& config, const RunMetrics& metrics, const RunTrace& trace) {
  const GridShape& shape = scenario.prior.shape();
  json targets = json::array();
  for (const Vec2& t : scenario.targets.positions()) targets.push_back(detail::point(t));

  json rounds = json::array();
  for (const RoundTrace& rt : trace.rounds) {
    json r;
    r["start_time_s"] = rt.start_time;
    json pos = json::array();
    for (const Vec2& p : rt.positions) pos.push_back(detail::point(p));
    r["positions"] = pos;
    json trajs = json::array();
    for (const auto& t : rt.trajectories) trajs.push_back(t ? trajectory_to_json(*t) : json(nullptr));
    r["trajectories"] = trajs;
    if (!rt.plans.empty()) {
      json plans = json::array();
      for (const auto& p : rt.plans) plans.push_back(p ? plan_to_json(*p) : json(nullptr));
      r["plans"] = plans;
    }
    if (rt.labeling) r["labels"] = rt.labeling->labels;
    rounds.push_back(std::move(r));
  }

  json timeline = json::array();
  for (const FoundEvent& e : metrics.found_timeline)
    timeline.push_back({{"time_s", e.time}, {"path_m", e.path_length}, {"found", e.found}});

  return json{{"seed", seed},
              {"strategy", strategy},
              {"n_agents", config.n_agents},
              {"sensor_half_side", config.sensor.half_side},
              {"map",
               {{"width_cells", shape.cols},
                {"height_cells", shape.rows},
                {"cell_size_m", shape.cell_size},
                {"prior", std::vector<double>(scenario.prior.values().begin(), scenario.prior.values().end())}}},
              {"targets", targets},
              {"rounds", rounds},
              {"timeline", timeline},
              {"metrics",
               {{"success", metrics.success},
                {"working_time_s", metrics.working_time},
                {"path_lengths_m", metrics.path_length},
                {"rounds", metrics.rounds_executed},
                {"targets_total", metrics.targets_total},
                {"targets_found", metrics.targets_found}}}};
}

inline std::string trace_file_name(std::uint64_t seed, const std::string& strategy, std::size_t n_agents) {
  std::string s = strategy;
  for (char& c : s)
    if (c == '+') c = '_';
  return "seed" + std::to_string(seed) + "_" + s + "_n" + std::to_string(n_agents) + ".json";
}

}  // namespace vsearch
