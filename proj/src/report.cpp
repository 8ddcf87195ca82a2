// SPDX-License-Identifier: Apache-2.0
#include "qplan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace qplan {

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string op_label(const OpKey& key) {
  return "q" + std::to_string(key.qid) + ":" + std::to_string(key.prior_level) + ">" +
         std::to_string(key.level) + ":" + std::to_string(key.op_index);
}

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write report file: " + path);
  return out;
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (window, load)
};

//! Minimal line chart; everything about it is deterministic.
void write_svg(const std::string& dir, const std::string& name,
               const std::vector<Series>& series) {
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                  "#bcbd22", "#17becf", "#393b79"};
  const double width = 720, height = 400;
  const double l = 60, r = 16, t = 20, b = 60;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto sx = [&](double x) { return l + (x - xmin) / (xmax - xmin) * (width - l - r); };
  auto sy = [&](double y) { return height - b - (y - ymin) / (ymax - ymin) * (height - t - b); };

  auto out = open_out(dir, name);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(width)
      << "\" height=\"" << format_number(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << format_number(l) << "\" y1=\"" << format_number(height - b)
      << "\" x2=\"" << format_number(width - r) << "\" y2=\"" << format_number(height - b)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << format_number(l) << "\" y1=\"" << format_number(t) << "\" x2=\""
      << format_number(l) << "\" y2=\"" << format_number(height - b)
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << format_number(width / 2) << "\" y=\"" << format_number(height - 24)
      << "\" font-size=\"12\" text-anchor=\"middle\">window</text>\n";
  out << "<text x=\"14\" y=\"" << format_number(height / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << format_number(height / 2) << ")\">stream-processor load</text>\n";
  out << "<text x=\"" << format_number(l - 6) << "\" y=\"" << format_number(height - b + 4)
      << "\" font-size=\"10\" text-anchor=\"end\">" << format_number(ymin) << "</text>\n";
  out << "<text x=\"" << format_number(l - 6) << "\" y=\"" << format_number(t + 4)
      << "\" font-size=\"10\" text-anchor=\"end\">" << format_number(ymax) << "</text>\n";
  for (size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t p = 0; p < s.points.size(); ++p) {
      if (p) out << " ";
      out << format_number(sx(s.points[p].first)) << "," << format_number(sy(s.points[p].second));
    }
    out << "\"/>\n";
    out << "<text x=\"" << format_number(l + 8) << "\" y=\"" << format_number(t + 14 * (i + 1))
        << "\" font-size=\"11\" fill=\"" << color << "\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

Series series_of(const SimulationRun& run) {
  Series s;
  s.name = run.strategy;
  for (const auto& w : run.windows) s.points.emplace_back(w.window, w.sp_load);
  return s;
}

}  // namespace

void emit_report(const SimulationRun& run, const std::string& dir, bool svg) {
  {
    auto out = open_out(dir, "load_" + run.strategy + ".csv");
    out << "window,strategy,sp_load\n";
    for (const auto& w : run.windows) {
      out << w.window << "," << run.strategy << "," << format_number(w.sp_load) << "\n";
    }
  }
  {
    auto out = open_out(dir, "alloc_" + run.strategy + ".csv");
    out << "window,op,alloc_bits,req_bits,rho,load\n";
    for (const auto& w : run.windows) {
      for (const auto& op : w.operators) {
        out << w.window << "," << op_label(op.key) << "," << op.alloc_bits << "," << op.req_bits
            << "," << format_number(op.rho) << "," << format_number(op.load) << "\n";
      }
    }
  }
  {
    // Demand variability over the evaluation windows, per operator and for
    // the aggregate (the per-window sum of demands).
    std::map<OpKey, std::vector<double>> req;
    std::map<int, double> totals;
    for (const auto& w : run.windows) {
      for (const auto& op : w.operators) {
        req[op.key].push_back(static_cast<double>(op.req_bits));
        totals[w.window] += static_cast<double>(op.req_bits);
      }
    }
    auto out = open_out(dir, "cov_" + run.strategy + ".csv");
    out << "op,mean_req_bits,cov_req_bits\n";
    for (const auto& [key, values] : req) {
      double mean = 0;
      for (double v : values) mean += v;
      if (!values.empty()) mean /= static_cast<double>(values.size());
      out << op_label(key) << "," << format_number(mean) << ","
          << format_number(coefficient_of_variation(values)) << "\n";
    }
    std::vector<double> total_series;
    for (const auto& [w, v] : totals) total_series.push_back(v);
    double mean = 0;
    for (double v : total_series) mean += v;
    if (!total_series.empty()) mean /= static_cast<double>(total_series.size());
    out << "TOTAL," << format_number(mean) << ","
        << format_number(coefficient_of_variation(total_series)) << "\n";
  }
  if (svg) write_svg(dir, "load_" + run.strategy + ".svg", {series_of(run)});
}

void compare_runs(const std::vector<SimulationRun>& runs, const std::string& dir, bool svg) {
  if (runs.empty()) fail("compare: no runs given");
  {
    auto out = open_out(dir, "loads.csv");
    out << "window,strategy,sp_load\n";
    for (const auto& run : runs) {
      for (const auto& w : run.windows) {
        out << w.window << "," << run.strategy << "," << format_number(w.sp_load) << "\n";
      }
    }
  }
  {
    auto out = open_out(dir, "summary.csv");
    out << "strategy,windows,total_load,median_load\n";
    for (const auto& run : runs) {
      out << run.strategy << "," << run.windows.size() << "," << format_number(run.total_load)
          << "," << format_number(run.median_load) << "\n";
    }
  }
  if (svg) {
    std::vector<Series> series;
    for (const auto& run : runs) series.push_back(series_of(run));
    write_svg(dir, "compare.svg", series);
  }
}

}  // namespace qplan
