// Copyright 2026 The rcab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal static line charts. Output depends only on the input, so charts
// can be diffed between runs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace rcab::svg {

struct Point {
  double x = 0;
  std::optional<double> y;  // gap when empty
};

struct Series {
  std::string name;
  std::vector<Point> points;
  bool stepped = false;
  bool dashed = false;
  // Optional band drawn behind the line, same x as `points`.
  std::vector<std::pair<double, double>> band;
};

enum class YAxis { Linear, RankLog };

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  YAxis y_axis = YAxis::Linear;
  // RankLog only: value drawn as "--" (not in the ranking).
  std::optional<double> absent_value;
  std::vector<Series> series;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return palette[i % 8];
}

inline std::string tick_label(double v) {
  char buf[32];
  if (std::fabs(v - std::round(v)) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.2g", v);
  }
  return buf;
}

}  // namespace detail

inline std::string render(const Chart& c) {
  constexpr double W = 720, H = 420, L = 70, R = 190, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool any = false;
  for (const auto& s : c.series) {
    for (const auto& p : s.points) {
      x_min = any ? std::min(x_min, p.x) : p.x;
      x_max = any ? std::max(x_max, p.x) : p.x;
      any = true;
    }
  }
  if (!any || x_max <= x_min) x_max = x_min + 1;
  if (c.y_axis == YAxis::Linear) {
    y_min = 0;
    y_max = 1;
    for (const auto& s : c.series) {
      for (const auto& p : s.points) {
        if (p.y) y_max = std::max(y_max, *p.y);
      }
      for (const auto& [lo, hi] : s.band) y_max = std::max(y_max, hi);
    }
  } else {
    y_min = 1;
    y_max = c.absent_value.value_or(10);
    for (const auto& s : c.series) {
      for (const auto& p : s.points) {
        if (p.y) y_max = std::max(y_max, *p.y);
      }
    }
    y_max = std::max(y_max, 10.0);
  }

  auto sx = [&](double x) { return L + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) {
    if (c.y_axis == YAxis::Linear) return T + ph - (y - y_min) / (y_max - y_min) * ph;
    // Rank 1 at the top, log scale downwards.
    return T + std::log10(std::max(y, 1.0)) / std::log10(y_max) * ph;
  };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(W) +
       "\" height=\"" + detail::num(H) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + detail::num(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::escape(c.title) + "</text>\n";
  o += "<rect x=\"" + detail::num(L) + "\" y=\"" + detail::num(T) + "\" width=\"" +
       detail::num(pw) + "\" height=\"" + detail::num(ph) +
       "\" fill=\"none\" stroke=\"#444\"/>\n";

  // X ticks at the data's x values when few, else 6 even steps.
  std::vector<double> xs;
  for (const auto& s : c.series) {
    for (const auto& p : s.points) xs.push_back(p.x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() > 10) {
    xs.clear();
    for (int i = 0; i <= 6; ++i) xs.push_back(x_min + (x_max - x_min) * i / 6);
  }
  for (double x : xs) {
    o += "<line x1=\"" + detail::num(sx(x)) + "\" y1=\"" + detail::num(T + ph) +
         "\" x2=\"" + detail::num(sx(x)) + "\" y2=\"" + detail::num(T + ph + 4) +
         "\" stroke=\"#444\"/>\n";
    o += "<text x=\"" + detail::num(sx(x)) + "\" y=\"" + detail::num(T + ph + 16) +
         "\" text-anchor=\"middle\">" + detail::tick_label(x) + "</text>\n";
  }

  std::vector<std::pair<double, std::string>> ys;
  if (c.y_axis == YAxis::Linear) {
    for (int i = 0; i <= 5; ++i) {
      const double y = y_min + (y_max - y_min) * i / 5;
      ys.push_back({y, detail::tick_label(y)});
    }
  } else {
    for (double y = 1; y <= y_max; y *= 10) ys.push_back({y, detail::tick_label(y)});
    if (c.absent_value) ys.push_back({*c.absent_value, "--"});
  }
  for (const auto& [y, label] : ys) {
    o += "<line x1=\"" + detail::num(L - 4) + "\" y1=\"" + detail::num(sy(y)) +
         "\" x2=\"" + detail::num(L + pw) + "\" y2=\"" + detail::num(sy(y)) +
         "\" stroke=\"#ddd\"/>\n";
    o += "<text x=\"" + detail::num(L - 8) + "\" y=\"" + detail::num(sy(y) + 4) +
         "\" text-anchor=\"end\">" + detail::escape(label) + "</text>\n";
  }
  o += "<text x=\"" + detail::num(L + pw / 2) + "\" y=\"" + detail::num(H - 10) +
       "\" text-anchor=\"middle\">" + detail::escape(c.x_label) + "</text>\n";
  o += "<text transform=\"translate(16," + detail::num(T + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + detail::escape(c.y_label) +
       "</text>\n";

  for (std::size_t i = 0; i < c.series.size(); ++i) {
    const auto& s = c.series[i];
    const auto* col = detail::color(i);
    if (!s.band.empty() && s.band.size() == s.points.size()) {
      std::string up, down;
      for (std::size_t k = 0; k < s.band.size(); ++k) {
        up += detail::num(sx(s.points[k].x)) + "," + detail::num(sy(s.band[k].first)) + " ";
      }
      for (std::size_t k = s.band.size(); k-- > 0;) {
        down += detail::num(sx(s.points[k].x)) + "," + detail::num(sy(s.band[k].second)) + " ";
      }
      o += "<polygon points=\"" + up + down + "\" fill=\"" + col +
           "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    // Split into runs at gaps.
    std::string path;
    std::optional<std::pair<double, double>> prev;
    for (const auto& p : s.points) {
      if (!p.y) {
        prev.reset();
        continue;
      }
      const double px = sx(p.x), py = sy(*p.y);
      if (!prev) {
        path += "M" + detail::num(px) + " " + detail::num(py) + " ";
      } else if (s.stepped) {
        path += "L" + detail::num(px) + " " + detail::num(prev->second) + " L" +
                detail::num(px) + " " + detail::num(py) + " ";
      } else {
        path += "L" + detail::num(px) + " " + detail::num(py) + " ";
      }
      prev = {px, py};
      o += "<circle cx=\"" + detail::num(px) + "\" cy=\"" + detail::num(py) +
           "\" r=\"2.5\" fill=\"" + col + "\"/>\n";
    }
    if (!path.empty()) {
      o += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + col +
           "\" stroke-width=\"1.5\"" +
           (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    }
    const double ly = T + 10 + 16.0 * static_cast<double>(i);
    o += "<line x1=\"" + detail::num(L + pw + 12) + "\" y1=\"" + detail::num(ly) +
         "\" x2=\"" + detail::num(L + pw + 32) + "\" y2=\"" + detail::num(ly) +
         "\" stroke=\"" + col + "\" stroke-width=\"2\"" +
         (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    o += "<text x=\"" + detail::num(L + pw + 36) + "\" y=\"" + detail::num(ly + 4) +
         "\">" + detail::escape(s.name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace rcab::svg
