#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "normsim/harness.hpp"

namespace normsim {

namespace fs = std::filesystem;

namespace {

struct Series {
  std::string label;
  std::string colour;
  std::vector<double> values;
};

std::string render_chart(const std::string& title,
                         const std::vector<Series>& series) {
  constexpr int kWidth = 720, kHeight = 420;
  constexpr int kLeft = 60, kRight = 20, kTop = 40, kBottom = 40;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::size_t n = 0;
  double vmin = 0.0, vmax = 0.0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (vmax == vmin) vmax = vmin + 1.0;

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                kWidth, kHeight, kWidth, kHeight);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" "
                "font-size=\"16\">%s</text>\n",
                kLeft, title.c_str());
  svg += buf;

  // axes
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                "stroke=\"black\"/>\n",
                kLeft, kTop, kLeft, kHeight - kBottom);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                "stroke=\"black\"/>\n",
                kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom);
  svg += buf;

  auto y_of = [&](double v) {
    return kTop + plot_h * (1.0 - (v - vmin) / (vmax - vmin));
  };
  for (int tick = 0; tick <= 4; ++tick) {
    double v = vmin + (vmax - vmin) * tick / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"end\">%.3g</text>\n",
                  kLeft - 6, y_of(v) + 4, v);
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                "font-size=\"11\">step (0..%zu)</text>\n",
                kWidth / 2 - 30, kHeight - 10, n > 0 ? n - 1 : 0);
  svg += buf;

  int legend_y = kTop + 6;
  for (const auto& s : series) {
    if (s.values.empty()) continue;
    std::string points;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      double x = kLeft + (n > 1 ? plot_w * i / (n - 1) : 0.0);
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x, y_of(s.values[i]));
      points += buf;
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.colour +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%d\" y=\"%d\" width=\"12\" height=\"4\" "
                  "fill=\"%s\"/><text x=\"%d\" y=\"%d\" "
                  "font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
                  kWidth - 140, legend_y, s.colour.c_str(), kWidth - 122,
                  legend_y + 6, s.label.c_str());
    svg += buf;
    legend_y += 18;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

std::vector<fs::path> emit_charts(const fs::path& uns_dir,
                                  const fs::path& iron_dir,
                                  const fs::path& out_dir) {
  auto uns = read_aggregate_csv(uns_dir / "aggregate_ma50.csv");
  auto iron = read_aggregate_csv(iron_dir / "aggregate_ma50.csv");
  if (uns.empty())
    throw std::runtime_error("empty aggregate: " +
                             (uns_dir / "aggregate_ma50.csv").string());
  if (iron.empty())
    throw std::runtime_error("empty aggregate: " +
                             (iron_dir / "aggregate_ma50.csv").string());

  struct Metric {
    std::string file;
    std::string title;
    double (*pick)(const AggregateRecord&);
  };
  const std::vector<Metric> metrics = {
      {"avg_waiting_all.svg", "Average waiting time, all vehicles",
       [](const AggregateRecord& a) { return a.avg_waiting_all; }},
      {"total_waiting_priority.svg", "Total waiting time, priority vehicles",
       [](const AggregateRecord& a) { return a.total_waiting_priority; }},
      {"collisions.svg", "Collisions per step",
       [](const AggregateRecord& a) { return a.collisions; }},
  };

  // Render everything before touching the filesystem so a failure leaves
  // no partial chart set behind.
  std::vector<std::pair<fs::path, std::string>> rendered;
  for (const auto& metric : metrics) {
    std::vector<Series> series(2);
    series[0] = {"UNS", "#1f77b4", {}};
    series[1] = {"IRON", "#d62728", {}};
    for (const auto& a : uns) series[0].values.push_back(metric.pick(a));
    for (const auto& a : iron) series[1].values.push_back(metric.pick(a));
    rendered.push_back(
        {out_dir / metric.file, render_chart(metric.title, series)});
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::vector<fs::path> written;
  for (auto& [path, svg] : rendered) {
    std::ofstream out(path);
    if (!out)
      throw std::runtime_error("cannot write chart file: " + path.string());
    out << svg;
    written.push_back(path);
  }
  return written;
}

}  // namespace normsim
