#include "mobcache/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace mobcache::bench {

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void sort_rows(ResultTable& table) {
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     if (a.grid_value != b.grid_value) return a.grid_value < b.grid_value;
                     if (a.strategy != b.strategy) return a.strategy < b.strategy;
                     return a.metric < b.metric;
                   });
}

void write_results_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "grid_param,grid_value,strategy,metric,value,std_error,seed\n";
  for (const auto& r : table.rows)
    out << r.grid_param << ',' << fmt9(r.grid_value) << ',' << r.strategy << ',' << r.metric << ','
        << fmt9(r.value) << ',' << fmt9(r.std_error) << ',' << r.seed << '\n';
}

void write_results_svg(const ResultTable& table, const std::string& metric,
                       const std::string& path) {
  // series[strategy] = (grid value, metric value), sorted by grid value
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::string grid_param = "grid";
  for (const auto& r : table.rows) {
    if (r.metric != metric) continue;
    series[r.strategy].emplace_back(r.grid_value, r.value);
    grid_param = r.grid_param;
  }
  if (series.empty()) throw std::runtime_error("no rows for metric '" + metric + "'");
  for (auto& [name, points] : series) std::sort(points.begin(), points.end());

  double x_lo = series.begin()->second.front().first;
  double x_hi = x_lo;
  for (const auto& [name, points] : series)
    for (const auto& [x, y] : points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;

  const double width = 640, height = 420;
  const double ml = 60, mr = 150, mt = 20, mb = 45;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;
  auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return mt + (1.0 - y) * plot_h; };  // metrics live in [0, 1]

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes and gridlines
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w << "\" y2=\""
      << mt + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = 0.25 * k;
    out << "<line x1=\"" << ml << "\" y1=\"" << py(y) << "\" x2=\"" << ml + plot_w << "\" y2=\""
        << py(y) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << fmt_coord(y) << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double x = x_lo + (x_hi - x_lo) * k / 4.0;
    out << "<text x=\"" << px(x) << "\" y=\"" << mt + plot_h + 18
        << "\" text-anchor=\"middle\" font-size=\"12\">" << fmt9(x) << "</text>\n";
  }
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" font-size=\"13\">" << grid_param << "</text>\n";
  out << "<text x=\"16\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " << mt + plot_h / 2
      << ")\">" << metric << "</text>\n";

  std::size_t idx = 0;
  for (const auto& [name, points] : series) {
    const char* color = kPalette[idx % (sizeof kPalette / sizeof kPalette[0])];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : points) out << fmt_coord(px(x)) << ',' << fmt_coord(py(y)) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : points)
      out << "<circle cx=\"" << fmt_coord(px(x)) << "\" cy=\"" << fmt_coord(py(y))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = mt + 16 + 18 * static_cast<double>(idx);
    out << "<line x1=\"" << ml + plot_w + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << ml + plot_w + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + plot_w + 40 << "\" y=\"" << ly
        << "\" font-size=\"12\">" << name << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

std::vector<std::string> emit_report(ResultTable table, const std::string& out_dir, bool with_svg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + out_dir + "': " + ec.message());

  sort_rows(table);
  std::vector<std::string> written;
  const std::string csv = (fs::path(out_dir) / "results.csv").string();
  write_results_csv(table, csv);
  written.push_back(csv);

  if (with_svg) {
    std::set<std::string> metrics;
    for (const auto& r : table.rows) metrics.insert(r.metric);
    for (const auto& metric : metrics) {
      const std::string svg = (fs::path(out_dir) / ("results_" + metric + ".svg")).string();
      write_results_svg(table, metric, svg);
      written.push_back(svg);
    }
  }
  return written;
}

}  // namespace mobcache::bench
