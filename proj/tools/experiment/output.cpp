// Copyright 2026 The cqed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cqed/common.hpp"

namespace cqed::cli {
namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick spacing of 1, 2 or 5 times a power of ten giving about five ticks.
double nice_step(double span) {
  const double raw = span / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1 : f < 3.5 ? 2 : f < 7.5 ? 5 : 10) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(std::abs(hi) * 0.05, 1e-3);
      lo -= pad;
      hi += pad;
    }
  }
};

constexpr const char* kColors[] = {"#000000", "#1f5fbf", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#7f8c8d",
                                   "#16a085"};

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

CsvTable::CsvTable(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

CsvTable::Row& CsvTable::Row::operator<<(double v) {
  cells_.push_back(format_number(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(const std::string& s) {
  std::string cell = s;
  if (cell.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : cell) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    cell = q + "\"";
  }
  cells_.push_back(cell);
  return *this;
}

CsvTable::Row CsvTable::row() {
  rows_.emplace_back();
  return Row(rows_.back());
}

std::string CsvTable::str() const {
  std::ostringstream out;
  out << "# cqed " << name_ << ' ' << kSchemaVersion << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& r : rows_) {
    if (r.size() != columns_.size())
      throw Error("table " + name_ + ": row has " + std::to_string(r.size()) + " cells, expected " +
                  std::to_string(columns_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  return out.str();
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

std::string render_svg(const Plot& p) {
  constexpr double W = 640, H = 420, L = 72, R = 170, T = 36, B = 56;
  const double pw = W - L - R, ph = H - T - B;
  Range xr, yr;
  for (const auto& s : p.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  const double xs = nice_step(xr.hi - xr.lo), ys = nice_step(yr.hi - yr.lo);
  const double x0 = std::floor(xr.lo / xs) * xs, x1 = std::ceil(xr.hi / xs) * xs;
  const double y0 = std::floor(yr.lo / ys) * ys, y1 = std::ceil(yr.hi / ys) * ys;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return T + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fixed(L + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(p.title)
    << "</text>\n";
  o << "<rect x=\"" << fixed(L) << "\" y=\"" << fixed(T) << "\" width=\"" << fixed(pw) << "\" height=\"" << fixed(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int xticks = static_cast<int>(std::lround((x1 - x0) / xs));
  for (int i = 0; i <= xticks; ++i) {
    const double v = x0 + i * xs;
    o << "<line x1=\"" << fixed(px(v)) << "\" y1=\"" << fixed(T + ph) << "\" x2=\"" << fixed(px(v)) << "\" y2=\""
      << fixed(T + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fixed(px(v)) << "\" y=\"" << fixed(T + ph + 18) << "\" text-anchor=\"middle\">"
      << format_number(std::abs(v) < 1e-9 * xs ? 0 : v) << "</text>\n";
  }
  const int yticks = static_cast<int>(std::lround((y1 - y0) / ys));
  for (int i = 0; i <= yticks; ++i) {
    const double v = y0 + i * ys;
    o << "<line x1=\"" << fixed(L - 5) << "\" y1=\"" << fixed(py(v)) << "\" x2=\"" << fixed(L) << "\" y2=\""
      << fixed(py(v)) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fixed(L - 8) << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">"
      << format_number(std::abs(v) < 1e-9 * ys ? 0 : v) << "</text>\n";
  }
  o << "<text x=\"" << fixed(L + pw / 2) << "\" y=\"" << fixed(H - 14) << "\" text-anchor=\"middle\">"
    << escape_xml(p.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << fixed(T + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fixed(T + ph / 2) << ")\">" << escape_xml(p.y_label) << "</text>\n";

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += (pts.empty() ? "" : " ") + fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
    }
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
      << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts << "\"/>\n";
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        o << "<circle cx=\"" << fixed(px(s.x[i])) << "\" cy=\"" << fixed(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
          << "\"/>";
      }
      o << '\n';
    }
    const double ly = T + 12 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << fixed(L + pw + 12) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(L + pw + 36)
      << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
      << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>";
    o << "<text x=\"" << fixed(L + pw + 42) << "\" y=\"" << fixed(ly + 4) << "\">" << escape_xml(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const Plot& p, const std::string& path) { write_text(path, render_svg(p)); }

}  // namespace cqed::cli
