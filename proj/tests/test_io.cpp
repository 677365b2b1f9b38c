#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "oracles.hpp"

using namespace vsearch;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vsearch_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(VSEARCH_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

std::string error_of(const json& j) {
  try {
    experiment_from_json(j);
  } catch (const SpecError& e) {
    return e.what();
  }
  return {};
}

json minimal_spec() {
  return json{{"scenario", {{"width_cells", 30}, {"height_cells", 30}, {"cell_size_m", 1.0}, {"n_targets", 5}}},
              {"strategies", {"proposed"}},
              {"seeds", {1}}};
}

}  // namespace

TEST(ScenarioJson, RoundTrip) {
  ScenarioFile s{42, ScenarioParams{80, 60, 0.5, 9, RateParams{0.1, 3.0, 1.2}}};
  const ScenarioFile back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.params.width_cells, 80);
  EXPECT_EQ(back.params.height_cells, 60);
  EXPECT_EQ(back.params.cell_size, 0.5);
  EXPECT_EQ(back.params.n_targets, 9u);
  EXPECT_EQ(back.params.rate_params.b, 3.0);
  EXPECT_EQ(back.params.rate_params.e_star, 1.2);
}

TEST(ScenarioJson, UnknownFieldIsNamed) {
  json j = scenario_to_json(ScenarioFile{});
  j["widht_cells"] = 3;
  try {
    scenario_from_json(j);
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("widht_cells"), std::string::npos);
  }
  json k = scenario_to_json(ScenarioFile{});
  k["rate_params"]["c"] = 1.0;
  try {
    scenario_from_json(k);
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("rate_params.c"), std::string::npos);
  }
}

TEST(TrajectoryJson, RoundTripAndValidation) {
  const auto t = solve_quintic(AgentState{Vec2{1, 2}, Vec2{0.5, 0}, {}}, Vec2{4, 4}, 3.0);
  const auto back = trajectory_from_json(trajectory_to_json(t));
  EXPECT_EQ(back.coeffs_x, t.coeffs_x);
  EXPECT_EQ(back.coeffs_y, t.coeffs_y);
  EXPECT_EQ(back.duration, t.duration);
  json bad = trajectory_to_json(t);
  bad["duration_s"] = -1.0;
  EXPECT_THROW(trajectory_from_json(bad), SpecError);
}

TEST(ExperimentSpec, ParsesDefaultsAndVariants) {
  json j = minimal_spec();
  j["strategies"] = {"proposed", "voronoi+hlm", "zigzag"};
  j["n_agents"] = {1, 3};
  j["planner"] = {{"n_steps", 3}};
  const ExperimentSpec s = experiment_from_json(j);
  EXPECT_EQ(s.base.planner.n_steps, 3);
  EXPECT_EQ(s.base.planner.n_rays, 36u);
  const auto v = s.variants();
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v[2].strategy, "voronoi+hlm");
  EXPECT_EQ(v[2].config.strategy.kind, StrategyKind::HeuristicLocalMaxima);
  EXPECT_TRUE(v[2].config.use_voronoi);
  EXPECT_EQ(v[3].config.n_agents, 3u);
}

TEST(ExperimentSpec, PlainBaselinesSearchTheWholeMap) {
  for (const char* name : {"gm", "lm", "hlm"}) {
    const auto c = parse_strategy(name);
    ASSERT_TRUE(c);
    EXPECT_FALSE(c->use_voronoi);
  }
  EXPECT_FALSE(parse_strategy("GM").has_value());
}

TEST(ExperimentSpec, DiagnosticsNameTheField) {
  json j = minimal_spec();
  j["max_round"] = 3;
  EXPECT_NE(error_of(j).find("max_round"), std::string::npos);

  j = minimal_spec();
  j["planner"]["gamma"] = 0.9;
  EXPECT_NE(error_of(j).find("planner.gamma"), std::string::npos);

  j = minimal_spec();
  j["strategies"] = {"proposed", "astar"};
  const std::string msg = error_of(j);
  EXPECT_NE(msg.find("astar"), std::string::npos);
  for (const auto& n : valid_strategy_names()) EXPECT_NE(msg.find(n), std::string::npos);

  j = minimal_spec();
  j["seeds"] = json::array();
  EXPECT_NE(error_of(j).find("seeds"), std::string::npos);

  j = minimal_spec();
  j["strategies"] = json::array();
  EXPECT_NE(error_of(j).find("strategies"), std::string::npos);

  j = minimal_spec();
  j["scenario"]["n_targets"] = "many";
  EXPECT_NE(error_of(j).find("n_targets"), std::string::npos);

  j = minimal_spec();
  j["limits"] = {{"v_max", -1.0}};
  EXPECT_FALSE(error_of(j).empty());
}

TEST(SummaryCsv, RowsParseBackLosslessly) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<SummaryRow> rows;
  for (int k = 0; k < 30; ++k) {
    SummaryRow r;
    r.seed = rng();
    r.strategy = k % 2 ? "voronoi+gm" : "proposed";
    r.n_agents = 1 + k % 5;
    r.status = k % 7 == 3 ? "failed" : "ok";
    r.success = k % 3 == 0;
    r.targets_total = 20;
    r.targets_found = k % 21;
    r.rounds = k * 13;
    r.termination = "all_found";
    r.working_time_s = u(rng) / 3.0;
    r.max_path_m = u(rng) / 7.0;
    r.total_path_m = u(rng) * 1e-7;
    for (std::size_t i = 0; i < r.n_agents; ++i) r.path_lengths_m.push_back(u(rng) / 11.0);
    for (std::size_t i = 0; i < r.n_agents; ++i) r.flight_times_s.push_back(u(rng) / 13.0);
    if (k % 4) r.time_to_half_s = u(rng) / 17.0;
    if (k % 5) r.path_to_half_m = u(rng) / 19.0;
    r.mean_plan_cells = u(rng) * 31.3;
    if (r.status == "failed") r.error = "bad, \"quoted\" thing";
    rows.push_back(r);
  }
  std::stringstream ss;
  write_summary_csv(ss, rows);
  EXPECT_EQ(parse_summary_csv(ss), rows);
}

TEST(SummaryCsv, RejectsForeignHeader) {
  std::stringstream ss("seed,foo\n1,2\n");
  EXPECT_THROW(parse_summary_csv(ss), SpecError);
}

TEST(Svg, EmptyTraceHasAxesAndHeatField) {
  const json trace{{"n_agents", 2},
                   {"map", {{"width_cells", 4}, {"height_cells", 3}, {"cell_size_m", 1.0},
                            {"prior", std::vector<double>{0, 1, 2, 3, 0, 0, 0, 0, 1, 1, 1, 1}}}},
                   {"rounds", json::array()}};
  const std::string svg = svg_trajectories(trace);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("id=\"heat\""), std::string::npos);
  EXPECT_NE(svg.find("id=\"axes\""), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 0u);
  EXPECT_EQ(count(svg, "<rect x="), 7u + 1u);  // positive cells plus the axes frame
}

TEST(Svg, ThreeAgentRunHasThreePolylineGroups) {
  const Scenario s = generate_scenario(3, ScenarioParams{40, 40, 1.0, 6, {}});
  SimConfig c;
  c.n_agents = 3;
  c.rng_seed = 3;
  RunTrace trace{1, false, {}};
  const auto m = run(s, c, &trace);
  const json j = run_trace_to_json(3, "proposed", s, c, m, trace);
  const json copy = j;
  const std::string svg = svg_trajectories(j);
  EXPECT_EQ(j, copy);
  EXPECT_EQ(count(svg, "<polyline"), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_NE(svg.find("id=\"agent" + std::to_string(i) + "\""), std::string::npos);

  const std::string part = svg_partition(j);
  EXPECT_EQ(count(part, "fill-opacity"), 1600u);
  const std::string tl = svg_timeline(j);
  EXPECT_NE(tl.find("targets_found"), std::string::npos);
}

TEST(Svg, ScalabilityCurvesAreSortedByAgentCount) {
  std::vector<SummaryRow> rows;
  std::vector<TimingRow> timing;
  for (std::size_t n : {8u, 1u, 4u, 2u}) {
    for (std::uint64_t seed : {1u, 2u}) {
      SummaryRow r;
      r.seed = seed;
      r.strategy = "proposed";
      r.n_agents = n;
      r.status = "ok";
      r.max_path_m = 100.0 / n;
      rows.push_back(r);
      timing.push_back({seed, "proposed", n, 10, 0.002});
    }
  }
  const std::string svg = svg_scalability(rows, timing);
  EXPECT_EQ(count(svg, "class=\"point\""), 8u);
  // x coordinates of the first curve strictly increase.
  const std::regex pt("class=\"point\" cx=\"([0-9.]+)\"");
  std::vector<double> xs;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), pt); it != std::sregex_iterator(); ++it)
    xs.push_back(std::stod((*it)[1]));
  ASSERT_EQ(xs.size(), 8u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_LT(xs[i - 1], xs[i]);
  for (std::size_t i = 5; i < 8; ++i) EXPECT_LT(xs[i - 1], xs[i]);
}

TEST(Cli, MinimalSpecWritesOneRow) {
  const fs::path dir = scratch("minimal");
  std::ofstream(dir / "spec.json") << minimal_spec().dump();
  ASSERT_EQ(cli("run --spec " + (dir / "spec.json").string() + " --out " + (dir / "out").string(), dir / "log"), 0)
      << slurp(dir / "log");
  std::ifstream in(dir / "out" / "summary.csv");
  const auto rows = parse_summary_csv(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].strategy, "proposed");
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_TRUE(fs::exists(dir / "out" / "timing.csv"));
  const fs::path trace = dir / "out" / "traces" / trace_file_name(1, "proposed", 1);
  ASSERT_TRUE(fs::exists(trace));

  for (const char* kind : {"trajectories", "partition", "timeline"}) {
    const fs::path svg = dir / (std::string(kind) + ".svg");
    EXPECT_EQ(cli("plot --trace " + trace.string() + " --kind " + kind + " --out " + svg.string(), dir / "log"), 0);
    EXPECT_EQ(slurp(svg).rfind("<svg", 0), 0u);
  }
  EXPECT_EQ(cli("plot --trace " + (dir / "out" / "summary.csv").string() + " --kind scalability --out " +
                    (dir / "s.svg").string(),
                dir / "log"),
            0);
  EXPECT_NE(cli("plot --trace " + trace.string() + " --kind pie --out " + (dir / "x.svg").string(), dir / "log"), 0);
}

TEST(Cli, UnknownStrategyFailsWithValidNames) {
  const fs::path dir = scratch("unknown");
  json j = minimal_spec();
  j["strategies"] = {"bogus"};
  std::ofstream(dir / "spec.json") << j.dump();
  EXPECT_NE(cli("run --spec " + (dir / "spec.json").string() + " --out " + (dir / "out").string(), dir / "log"), 0);
  const std::string log = slurp(dir / "log");
  EXPECT_NE(log.find("bogus"), std::string::npos);
  for (const auto& n : valid_strategy_names()) EXPECT_NE(log.find(n), std::string::npos);
}

TEST(Cli, FailedRowsStillExitZero) {
  const fs::path dir = scratch("failed");
  json j = minimal_spec();
  j["scenario"]["width_cells"] = 2;
  j["scenario"]["height_cells"] = 2;
  std::ofstream(dir / "spec.json") << j.dump();
  EXPECT_EQ(cli("run --spec " + (dir / "spec.json").string() + " --out " + (dir / "out").string(), dir / "log"), 0);
  std::ifstream in(dir / "out" / "summary.csv");
  const auto rows = parse_summary_csv(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].status, "failed");
  EXPECT_FALSE(rows[0].error.empty());
}

TEST(Cli, RerunIsByteIdentical) {
  const fs::path dir = scratch("rerun");
  json j = minimal_spec();
  j["strategies"] = {"proposed", "gm", "zigzag"};
  j["n_agents"] = {1, 2};
  j["seeds"] = {4, 5};
  j["traces"] = false;
  std::ofstream(dir / "spec.json") << j.dump();
  const std::string spec = (dir / "spec.json").string();
  ASSERT_EQ(cli("run --spec " + spec + " --out " + (dir / "a").string() + " --jobs 1", dir / "log"), 0);
  ASSERT_EQ(cli("run --spec " + spec + " --out " + (dir / "b").string() + " --jobs 3", dir / "log"), 0);
  EXPECT_EQ(slurp(dir / "a" / "summary.csv"), slurp(dir / "b" / "summary.csv"));
  EXPECT_FALSE(fs::exists(dir / "a" / "traces"));
}

TEST(Cli, GenScenarioFeedsRun) {
  const fs::path dir = scratch("gen");
  ASSERT_EQ(cli("gen-scenario --seed 9 --width 25 --height 20 --targets 4 --out " + (dir / "sc.json").string() +
                    " --map-csv " + (dir / "map.csv").string(),
                dir / "log"),
            0);
  const ScenarioFile sf = scenario_from_json(read_json_file(dir / "sc.json"));
  EXPECT_EQ(sf.seed, 9u);
  EXPECT_EQ(sf.params.width_cells, 25);
  EXPECT_EQ(count(slurp(dir / "map.csv"), "\n"), 20u);

  std::ofstream(dir / "spec.json") << json{{"scenario_file", "sc.json"}, {"strategies", {"gm"}}}.dump();
  ASSERT_EQ(cli("run --spec " + (dir / "spec.json").string() + " --out " + (dir / "out").string(), dir / "log"), 0)
      << slurp(dir / "log");
  std::ifstream in(dir / "out" / "summary.csv");
  const auto rows = parse_summary_csv(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].seed, 9u);
  EXPECT_EQ(rows[0].targets_total, 4u);
}
