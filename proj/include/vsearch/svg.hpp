#pragma once

// SVG renderings of run traces and batch summaries.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vsearch/io.hpp"

namespace vsearch {

namespace detail {

inline const char* agent_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                                  "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
  return palette[i % (sizeof palette / sizeof palette[0])];
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct TraceMap {
  int cols{0};
  int rows{0};
  double cell_size{1.0};
  std::vector<double> prior;
};

inline TraceMap trace_map(const json& trace) {
  TraceMap m;
  if (!trace.contains("map")) return m;
  const json& j = trace.at("map");
  m.cols = j.value("width_cells", 0);
  m.rows = j.value("height_cells", 0);
  m.cell_size = j.value("cell_size_m", 1.0);
  if (j.contains("prior")) m.prior = j.at("prior").get<std::vector<double>>();
  if (m.prior.size() != static_cast<std::size_t>(m.cols) * static_cast<std::size_t>(m.rows)) m.prior.clear();
  return m;
}

// World frame has y up; SVG has y down.
struct Frame {
  double scale{1.0};
  double width_m{0.0};
  double height_m{0.0};
  double margin{40.0};
  double x(double wx) const { return margin + wx * scale; }
  double y(double wy) const { return margin + (height_m - wy) * scale; }
  double width_px() const { return 2 * margin + std::max(1.0, width_m * scale); }
  double height_px() const { return 2 * margin + std::max(1.0, height_m * scale); }
};

inline std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
}

inline Frame map_frame(const TraceMap& m, double target_px = 600.0) {
  const double w = m.cols * m.cell_size;
  const double h = m.rows * m.cell_size;
  Frame f;
  f.width_m = w;
  f.height_m = h;
  f.scale = (w > 0.0 && h > 0.0) ? target_px / std::max(w, h) : 1.0;
  return f;
}

inline void heat_field(std::ostringstream& os, const TraceMap& m, const Frame& f) {
  os << "<g id=\"heat\">\n";
  if (!m.prior.empty()) {
    const double vmax = *std::max_element(m.prior.begin(), m.prior.end());
    for (int r = 0; r < m.rows; ++r) {
      for (int c = 0; c < m.cols; ++c) {
        const double v = m.prior[static_cast<std::size_t>(r) * m.cols + c];
        if (!(v > 0.0) || !(vmax > 0.0)) continue;
        const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v / vmax)));
        os << "<rect x=\"" << num(f.x(c * m.cell_size)) << "\" y=\"" << num(f.y((r + 1) * m.cell_size))
           << "\" width=\"" << num(m.cell_size * f.scale) << "\" height=\"" << num(m.cell_size * f.scale)
           << "\" fill=\"rgb(255," << shade << "," << shade << ")\"/>\n";
      }
    }
  }
  os << "</g>\n";
}

inline void map_axes(std::ostringstream& os, const Frame& f) {
  os << "<g id=\"axes\">\n";
  os << "<rect x=\"" << num(f.x(0)) << "\" y=\"" << num(f.y(f.height_m)) << "\" width=\"" << num(f.width_m * f.scale)
     << "\" height=\"" << num(f.height_m * f.scale) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(f.x(0)) << "\" y=\"" << num(f.y(0) + 16) << "\">0</text>\n";
  os << "<text x=\"" << num(f.x(f.width_m)) << "\" y=\"" << num(f.y(0) + 16) << "\" text-anchor=\"end\">"
     << num(f.width_m) << " m</text>\n";
  os << "<text x=\"" << num(f.x(0) - 4) << "\" y=\"" << num(f.y(f.height_m) + 4) << "\" text-anchor=\"end\">"
     << num(f.height_m) << "</text>\n";
  os << "</g>\n";
}

}  // namespace detail

/// Prior heat field with one polyline group per agent.
inline std::string svg_trajectories(const json& trace, int samples_per_segment = 24) {
  const detail::TraceMap m = detail::trace_map(trace);
  const detail::Frame f = detail::map_frame(m);
  std::ostringstream os;
  os << detail::svg_open(f.width_px(), f.height_px());
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  detail::heat_field(os, m, f);
  detail::map_axes(os, f);

  std::size_t n_agents = trace.value("n_agents", std::size_t{0});
  std::vector<std::vector<Vec2>> paths(n_agents);
  if (trace.contains("rounds")) {
    for (const json& round : trace.at("rounds")) {
      if (!round.contains("trajectories")) continue;
      const json& trajs = round.at("trajectories");
      for (std::size_t i = 0; i < trajs.size() && i < n_agents; ++i) {
        if (trajs[i].is_null()) continue;
        const QuinticTrajectory t = trajectory_from_json(trajs[i]);
        for (int k = 0; k <= samples_per_segment; ++k) {
          const double s = t.duration * k / samples_per_segment;
          paths[i].push_back(eval(t, std::min(s, t.duration)).position);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n_agents; ++i) {
    os << "<g id=\"agent" << i << "\">\n";
    if (!paths[i].empty()) {
      os << "<polyline fill=\"none\" stroke=\"" << detail::agent_color(i) << "\" stroke-width=\"1.5\" points=\"";
      for (const Vec2& p : paths[i]) os << detail::num(f.x(p.x)) << ',' << detail::num(f.y(p.y)) << ' ';
      os << "\"/>\n";
    }
    os << "</g>\n";
  }
  if (trace.contains("targets")) {
    os << "<g id=\"targets\">\n";
    for (const json& t : trace.at("targets"))
      os << "<circle cx=\"" << detail::num(f.x(t[0].get<double>())) << "\" cy=\""
         << detail::num(f.y(t[1].get<double>())) << "\" r=\"3\" fill=\"black\"/>\n";
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Cells shaded by the last recorded partition label.
inline std::string svg_partition(const json& trace) {
  const detail::TraceMap m = detail::trace_map(trace);
  const detail::Frame f = detail::map_frame(m);
  std::ostringstream os;
  os << detail::svg_open(f.width_px(), f.height_px());
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::vector<int> labels;
  if (trace.contains("rounds"))
    for (const json& round : trace.at("rounds"))
      if (round.contains("labels")) labels = round.at("labels").get<std::vector<int>>();
  os << "<g id=\"partition\">\n";
  if (labels.size() == static_cast<std::size_t>(m.cols) * static_cast<std::size_t>(m.rows)) {
    for (int r = 0; r < m.rows; ++r)
      for (int c = 0; c < m.cols; ++c)
        os << "<rect x=\"" << detail::num(f.x(c * m.cell_size)) << "\" y=\"" << detail::num(f.y((r + 1) * m.cell_size))
           << "\" width=\"" << detail::num(m.cell_size * f.scale) << "\" height=\""
           << detail::num(m.cell_size * f.scale) << "\" fill=\""
           << detail::agent_color(static_cast<std::size_t>(labels[static_cast<std::size_t>(r) * m.cols + c]))
           << "\" fill-opacity=\"0.45\"/>\n";
  }
  os << "</g>\n";
  detail::map_axes(os, f);
  os << "</svg>\n";
  return os.str();
}

namespace detail {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Line chart with one panel per series, stacked vertically.
inline std::string line_panels(const std::vector<Series>& series, const std::string& x_label, bool step) {
  const double w = 640.0, ph = 260.0, margin = 50.0;
  std::ostringstream os;
  os << svg_open(w, ph * std::max<std::size_t>(1, series.size()));
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const Series& se = series[s];
    const double top = ph * s;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (!se.points.empty()) {
      x0 = x1 = se.points.front().first;
      y1 = se.points.front().second;
      for (const auto& [x, y] : se.points) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
      if (x1 <= x0) x1 = x0 + 1.0;
      if (y1 <= y0) y1 = y0 + 1.0;
    }
    auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (w - 2 * margin); };
    auto py = [&](double y) { return top + ph - margin - (y - y0) / (y1 - y0) * (ph - 2 * margin); };
    os << "<g id=\"" << se.name << "\">\n";
    os << "<line x1=\"" << num(margin) << "\" y1=\"" << num(top + ph - margin) << "\" x2=\"" << num(w - margin)
       << "\" y2=\"" << num(top + ph - margin) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(margin) << "\" y1=\"" << num(top + margin) << "\" x2=\"" << num(margin) << "\" y2=\""
       << num(top + ph - margin) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(w / 2) << "\" y=\"" << num(top + ph - 12) << "\" text-anchor=\"middle\">" << x_label
       << "</text>\n";
    os << "<text x=\"" << num(margin) << "\" y=\"" << num(top + margin - 10) << "\">" << se.name << " (max "
       << num(y1) << ")</text>\n";
    if (!se.points.empty()) {
      os << "<polyline fill=\"none\" stroke=\"" << agent_color(s) << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < se.points.size(); ++i) {
        const auto& [x, y] = se.points[i];
        if (step && i > 0) os << num(px(x)) << ',' << num(py(se.points[i - 1].second)) << ' ';
        os << num(px(x)) << ',' << num(py(y)) << ' ';
      }
      os << "\"/>\n";
      if (!step)
        for (const auto& [x, y] : se.points)
          os << "<circle class=\"point\" cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\""
             << agent_color(s) << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace detail

/// Cumulative targets found against simulated time.
inline std::string svg_timeline(const json& trace) {
  detail::Series s{"targets_found", {{0.0, 0.0}}};
  if (trace.contains("timeline"))
    for (const json& e : trace.at("timeline"))
      s.points.emplace_back(e.value("time_s", 0.0), static_cast<double>(e.value("found", std::size_t{0})));
  return detail::line_panels({s}, "time [s]", true);
}

struct TimingRow {
  std::uint64_t seed{0};
  std::string strategy;
  std::size_t n_agents{1};
  std::size_t plan_calls{0};
  double mean_plan_time_s{0.0};
};

inline std::vector<TimingRow> parse_timing_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTimingHeader) throw SpecError("timing.csv: unexpected header");
  std::vector<TimingRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 5) throw SpecError("timing.csv: expected 5 fields");
    rows.push_back({std::stoull(f[0]), f[1], std::stoul(f[2]), std::stoul(f[3]), std::stod(f[4])});
  }
  return rows;
}

/// Mean of max path length and of per-decision plan time against the agent count, over the
/// successful rows. Without timing rows the second curve shows cells visited per decision.
inline std::string svg_scalability(const std::vector<SummaryRow>& summary, const std::vector<TimingRow>& timing) {
  std::map<std::size_t, std::pair<double, int>> path, plan;
  for (const SummaryRow& r : summary) {
    if (r.status != "ok") continue;
    auto& p = path[r.n_agents];
    p.first += r.max_path_m;
    ++p.second;
    if (timing.empty()) {
      auto& q = plan[r.n_agents];
      q.first += r.mean_plan_cells;
      ++q.second;
    }
  }
  for (const TimingRow& t : timing) {
    if (t.plan_calls == 0) continue;
    auto& q = plan[t.n_agents];
    q.first += t.mean_plan_time_s * 1e3;
    ++q.second;
  }
  detail::Series a{"max_path_m", {}};
  detail::Series b{timing.empty() ? "mean_plan_cells" : "mean_plan_time_ms", {}};
  for (const auto& [n, v] : path) a.points.emplace_back(static_cast<double>(n), v.first / v.second);
  for (const auto& [n, v] : plan) b.points.emplace_back(static_cast<double>(n), v.first / v.second);
  return detail::line_panels({a, b}, "agents", false);
}

}  // namespace vsearch
