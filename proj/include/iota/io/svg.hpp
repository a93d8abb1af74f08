/*
 * Copyright 2026 The iota-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iota/io/csv.hpp"

namespace iota::io {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Bar {
  std::string label;
  double value = 0.0;
  bool highlight = false;
};

namespace detail {

constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;
inline const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                       "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

inline std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Coordinates are rounded to 0.01 px so output is stable and compact.
inline std::string Px(double v) { return Num(std::round(v * 100.0) / 100.0); }

inline void Frame(std::ostringstream& svg, const std::string& title, const std::string& x_label,
                  const std::string& y_label, double x0, double x1, double y0, double y1) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << Escape(title) << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << Escape(x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << Escape(y_label) << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 + (y1 - y0) * i / 4.0;
    const double px = kLeft + (kWidth - kLeft - kRight) * i / 4.0;
    const double py = kHeight - kBottom - (kHeight - kTop - kBottom) * i / 4.0;
    svg << "<text x=\"" << Px(px) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << Num(std::round(fx * 1000) / 1000)
        << "</text>\n";
    svg << "<text x=\"" << kLeft - 4 << "\" y=\"" << Px(py + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << Num(std::round(fy * 1000) / 1000)
        << "</text>\n";
  }
}

inline void Range(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
}

}  // namespace detail

inline std::string LineChart(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<Series>& series,
                             bool log_y = false) {
  using namespace detail;
  auto fy = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool any = false;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(fy(y))) continue;
      if (!any) {
        x0 = x1 = x;
        y0 = y1 = fy(y);
        any = true;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, fy(y));
      y1 = std::max(y1, fy(y));
    }
  }
  Range(x0, x1);
  Range(y0, y1);
  std::ostringstream svg;
  Frame(svg, title, x_label, log_y ? "log10 " + y_label : y_label, x0, x1, y0, y1);
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
  auto py = [&](double y) {
    return kHeight - kBottom - (fy(y) - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  };
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (auto [x, y] : series[i].points) {
      if (!std::isfinite(x) || !std::isfinite(fy(y))) continue;
      svg << (first ? "" : " ") << Px(px(x)) << ',' << Px(py(y));
      first = false;
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 14 * (i + 1)
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << Escape(series[i].label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline std::string BarChart(const std::string& title, const std::string& y_label,
                            const std::vector<Bar>& bars, double reference_line = NAN) {
  using namespace detail;
  double y0 = 0, y1 = 0;
  for (const auto& b : bars) {
    y0 = std::min(y0, b.value);
    y1 = std::max(y1, b.value);
  }
  if (std::isfinite(reference_line)) {
    y0 = std::min(y0, reference_line);
    y1 = std::max(y1, reference_line);
  }
  Range(y0, y1);
  std::ostringstream svg;
  Frame(svg, title, "", y_label, 0, static_cast<double>(bars.size()), y0, y1);
  const double plot_w = kWidth - kLeft - kRight;
  const double slot = bars.empty() ? plot_w : plot_w / static_cast<double>(bars.size());
  auto py = [&](double y) { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double top = py(std::max(0.0, bars[i].value));
    const double bottom = py(std::min(0.0, bars[i].value));
    svg << "<rect x=\"" << Px(kLeft + slot * i + slot * 0.1) << "\" y=\"" << Px(top)
        << "\" width=\"" << Px(slot * 0.8) << "\" height=\"" << Px(bottom - top) << "\" fill=\""
        << (bars[i].highlight ? "#d62728" : "#1f77b4") << "\"><title>" << Escape(bars[i].label)
        << "</title></rect>\n";
  }
  if (std::isfinite(reference_line)) {
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\""
        << Px(py(reference_line)) << "\" y2=\"" << Px(py(reference_line))
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// Grid of cells coloured white (low) to dark blue (high); values[row][col].
inline std::string Heatmap(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<std::string>& columns,
                           const std::vector<std::string>& rows,
                           const std::vector<std::vector<double>>& values) {
  using namespace detail;
  double lo = 0, hi = 0;
  bool first = true;
  for (const auto& r : values) {
    for (double v : r) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << Escape(title) << "</text>\n";
  const double left = kLeft + 40, plot_w = kWidth - left - kRight, plot_h = kHeight - kTop - kBottom;
  const double cw = columns.empty() ? plot_w : plot_w / static_cast<double>(columns.size());
  const double ch = rows.empty() ? plot_h : plot_h / static_cast<double>(rows.size());
  for (std::size_t r = 0; r < rows.size() && r < values.size(); ++r) {
    const double y = kTop + ch * static_cast<double>(r);
    svg << "<text x=\"" << left - 6 << "\" y=\"" << Px(y + ch / 2 + 4) << "\" text-anchor=\"end\">"
        << Escape(rows[r]) << "</text>\n";
    for (std::size_t c = 0; c < columns.size() && c < values[r].size(); ++c) {
      const double t = hi > lo ? (values[r][c] - lo) / (hi - lo) : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 - 200.0 * t));
      const double x = left + cw * static_cast<double>(c);
      svg << "<rect x=\"" << Px(x) << "\" y=\"" << Px(y) << "\" width=\"" << Px(cw) << "\" height=\""
          << Px(ch) << "\" fill=\"rgb(" << shade << "," << shade << ",255)\" stroke=\"white\">"
          << "<title>" << Num(values[r][c]) << "</title></rect>\n";
      svg << "<text x=\"" << Px(x + cw / 2) << "\" y=\"" << Px(y + ch / 2 + 4)
          << "\" text-anchor=\"middle\" font-size=\"10\">" << Px(values[r][c]) << "</text>\n";
    }
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    svg << "<text x=\"" << Px(left + cw * (static_cast<double>(c) + 0.5)) << "\" y=\""
        << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">" << Escape(columns[c]) << "</text>\n";
  }
  svg << "<text x=\"" << Px(left + plot_w / 2) << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << Escape(x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << Escape(y_label) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace iota::io
