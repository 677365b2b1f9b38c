// vsearch: batch benchmark front-end.
//
//   vsearch run --spec <file> --out <dir> [--jobs K] [--plan-trace]
//   vsearch plot --trace <file> --kind trajectories|partition|timeline|scalability --out <file>
//   vsearch gen-scenario --seed S --out <file> [--width W --height H --cell-size C --targets N] [--map-csv <file>]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "vsearch/vsearch.hpp"

namespace fs = std::filesystem;
using namespace vsearch;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << text;
}

int cmd_run(const std::string& spec_path, const std::string& out_arg, unsigned jobs, bool plan_trace) {
  ExperimentSpec spec;
  try {
    spec = experiment_from_json(read_json_file(spec_path), fs::path(spec_path).parent_path());
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  const fs::path out_dir = out_arg.empty() ? fs::path(spec.output_dir) : fs::path(out_arg);
  if (out_dir.empty()) {
    std::cerr << "error: no output directory (pass --out or set output_dir)\n";
    return 2;
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: " << out_dir.string() << ": " << ec.message() << '\n';
    return 2;
  }

  const auto variants = spec.variants();
  std::vector<SimConfig> configs;
  for (const auto& v : variants) configs.push_back(v.config);

  RunTrace trace_options{spec.partition_every, plan_trace, {}};
  const bool want_trace = spec.traces || plan_trace;
  const auto rows = run_batch(spec.seeds, configs, spec.scenario, jobs, want_trace ? &trace_options : nullptr);

  std::vector<SummaryRow> summary;
  std::ofstream timing(out_dir / "timing.csv", std::ios::binary);
  timing << kTimingHeader << '\n';
  if (want_trace) fs::create_directories(out_dir / "traces");
  std::size_t failed = 0;
  for (const BatchRow& row : rows) {
    const auto& v = variants[row.config_index];
    summary.push_back(make_summary_row(row.seed, v.strategy, v.config.n_agents, row.metrics, row.error));
    if (!row.metrics) {
      ++failed;
      continue;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", row.metrics->mean_plan_time());
    timing << row.seed << ',' << v.strategy << ',' << v.config.n_agents << ',' << row.metrics->plan_calls << ','
           << buf << '\n';
    if (row.trace) {
      const Scenario scenario = generate_scenario(row.seed, spec.scenario);
      SimConfig cfg = v.config;
      cfg.rng_seed = row.seed;
      const json j = run_trace_to_json(row.seed, v.strategy, scenario, cfg, *row.metrics, *row.trace);
      write_text(out_dir / "traces" / trace_file_name(row.seed, v.strategy, v.config.n_agents), j.dump());
    }
  }
  std::ofstream csv(out_dir / "summary.csv", std::ios::binary);
  write_summary_csv(csv, summary);
  std::cout << rows.size() << " runs, " << failed << " failed; wrote " << (out_dir / "summary.csv").string() << '\n';
  return 0;
}

int cmd_plot(const std::string& trace_path, const std::string& kind, const std::string& out_path) {
  try {
    std::string svg;
    if (kind == "scalability") {
      std::ifstream in(trace_path);
      if (!in) throw SpecError(trace_path + ": cannot open");
      const auto summary = parse_summary_csv(in);
      std::vector<TimingRow> timing;
      const fs::path tp = fs::path(trace_path).parent_path() / "timing.csv";
      if (std::ifstream tin(tp); tin) timing = parse_timing_csv(tin);
      svg = svg_scalability(summary, timing);
    } else {
      const json trace = read_json_file(trace_path);
      for (const char* key : {"map", "n_agents", "rounds"})
        if (!trace.contains(key)) throw SpecError(trace_path + ": trace is missing field '" + key + "'");
      if (kind == "trajectories")
        svg = svg_trajectories(trace);
      else if (kind == "partition")
        svg = svg_partition(trace);
      else if (kind == "timeline")
        svg = svg_timeline(trace);
      else
        throw SpecError("--kind: unknown plot '" + kind + "' (valid: trajectories, partition, timeline, scalability)");
    }
    write_text(out_path, svg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int cmd_gen(std::uint64_t seed, const std::string& out_path, ScenarioParams params, const std::string& map_csv) {
  try {
    const Scenario s = generate_scenario(seed, params);
    write_text(out_path, scenario_to_json(ScenarioFile{seed, params}).dump(2) + "\n");
    if (!map_csv.empty()) {
      std::ofstream out(map_csv, std::ios::binary);
      write_grid_csv(out, s.prior.shape(), s.prior.values());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent active search simulator"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool plan_trace = false;
  auto* run = app.add_subcommand("run", "Execute an experiment spec");
  run->add_option("--spec", spec_path, "Experiment JSON")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--plan-trace", plan_trace, "Record lookahead plans in the traces");

  std::string trace_path, kind, plot_out;
  auto* plot = app.add_subcommand("plot", "Render a trace or summary as SVG");
  plot->add_option("--trace", trace_path, "Trace JSON, or summary.csv for scalability")->required();
  plot->add_option("--kind", kind, "trajectories|partition|timeline|scalability")->required();
  plot->add_option("--out", plot_out, "SVG file")->required();

  std::uint64_t seed = 0;
  std::string gen_out, map_csv;
  ScenarioParams params;
  auto* gen = app.add_subcommand("gen-scenario", "Write a scenario file");
  gen->add_option("--seed", seed, "Scenario seed")->required();
  gen->add_option("--out", gen_out, "Scenario JSON")->required();
  gen->add_option("--width", params.width_cells, "Columns")->check(CLI::PositiveNumber);
  gen->add_option("--height", params.height_cells, "Rows")->check(CLI::PositiveNumber);
  gen->add_option("--cell-size", params.cell_size, "Cell side [m]")->check(CLI::PositiveNumber);
  gen->add_option("--targets", params.n_targets, "Target count")->check(CLI::PositiveNumber);
  gen->add_option("--map-csv", map_csv, "Also write the prior as CSV");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(spec_path, out_dir, jobs, plan_trace);
  if (*plot) return cmd_plot(trace_path, kind, plot_out);
  return cmd_gen(seed, gen_out, params, map_csv);
}
