#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace shearsparse {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace detail

// Log-log line plot. Non-positive points are skipped. Output depends only on the
// data, so identical inputs give identical bytes.
inline std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 440, L = 70, R = 170, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0) {
        x0 = std::min(x0, std::log10(s.x[i])), x1 = std::max(x1, std::log10(s.x[i]));
        y0 = std::min(y0, std::log10(s.y[i])), y1 = std::max(y1, std::log10(s.y[i]));
      }
  if (!(x1 > x0)) x0 = 0, x1 = 1;
  if (!(y1 > y0)) y0 = -1, y1 = 0;
  x0 = std::floor(x0), x1 = std::ceil(x1), y0 = std::floor(y0), y1 = std::ceil(y1);
  auto px = [&](double v) { return L + (std::log10(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return T + (y1 - std::log10(v)) / (y1 - y0) * (H - T - B); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  out += "<rect x=\"" + detail::fmt(L) + "\" y=\"" + detail::fmt(T) + "\" width=\"" + detail::fmt(W - L - R) +
         "\" height=\"" + detail::fmt(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = x0; e <= x1; ++e) {
    const double x = px(std::pow(10.0, e));
    out += "<line x1=\"" + detail::fmt(x) + "\" y1=\"" + detail::fmt(H - B) + "\" x2=\"" + detail::fmt(x) + "\" y2=\"" +
           detail::fmt(T) + "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + detail::fmt(x) + "\" y=\"" + detail::fmt(H - B + 16) + "\" text-anchor=\"middle\">1e" +
           detail::fmt(e, "%.0f") + "</text>\n";
  }
  for (double e = y0; e <= y1; ++e) {
    const double y = py(std::pow(10.0, e));
    out += "<line x1=\"" + detail::fmt(L) + "\" y1=\"" + detail::fmt(y) + "\" x2=\"" + detail::fmt(W - R) + "\" y2=\"" +
           detail::fmt(y) + "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + detail::fmt(L - 6) + "\" y=\"" + detail::fmt(y + 4) + "\" text-anchor=\"end\">1e" +
           detail::fmt(e, "%.0f") + "</text>\n";
  }
  out += "<text x=\"" + detail::fmt((L + W - R) / 2) + "\" y=\"" + detail::fmt(H - 12) + "\" text-anchor=\"middle\">" +
         xlabel + "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::fmt((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         detail::fmt((T + H - B) / 2) + ")\">" + ylabel + "</text>\n";

  double legend_y = T + 12;
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0 && std::log10(s.y[i]) >= y0) pts += detail::fmt(px(s.x[i])) + "," + detail::fmt(py(s.y[i])) + " ";
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.6\"" +
           (s.dashed ? std::string(" stroke-dasharray=\"5,4\"") : std::string()) + " points=\"" + pts + "\"/>\n";
    out += "<line x1=\"" + detail::fmt(W - R + 10) + "\" y1=\"" + detail::fmt(legend_y) + "\" x2=\"" +
           detail::fmt(W - R + 34) + "\" y2=\"" + detail::fmt(legend_y) + "\" stroke=\"" + s.color + "\"" +
           (s.dashed ? std::string(" stroke-dasharray=\"5,4\"") : std::string()) + "/>\n";
    out += "<text x=\"" + detail::fmt(W - R + 40) + "\" y=\"" + detail::fmt(legend_y + 4) + "\">" + s.label + "</text>\n";
    legend_y += 18;
  }
  out += "</svg>\n";
  return out;
}

// Reference curves N^-1, N^-2 and N^-2 (log N)^3 through the first point of xs/ys.
inline std::vector<PlotSeries> reference_slopes(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || !(xs.front() > 1) || !(ys.front() > 0)) return {};
  const double a = xs.front(), b = ys.front();
  PlotSeries s1{"N^-1", {}, {}, "#999999", true};
  PlotSeries s2{"N^-2", {}, {}, "#555555", true};
  PlotSeries s3{"N^-2 log^3 N", {}, {}, "#bb8800", true};
  for (double x : xs) {
    s1.x.push_back(x), s1.y.push_back(b * a / x);
    s2.x.push_back(x), s2.y.push_back(b * (a * a) / (x * x));
    const double l = std::log(x) / std::log(a);
    s3.x.push_back(x), s3.y.push_back(b * (a * a) / (x * x) * l * l * l);
  }
  return {s1, s2, s3};
}

}  // namespace shearsparse
