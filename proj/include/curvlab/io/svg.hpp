#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/error.hpp"

namespace curvlab::io {

/// Static line plot. Points that are not finite (or not positive on a log
/// axis) are dropped and break the polyline.
struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool markers = false;
  bool right_axis = false;  // second y axis on the right
};

struct Plot {
  std::string title, xlabel, ylabel, ylabel_right;
  bool logx = false, logy = false, logy_right = false;
  std::vector<Series> series;
  std::vector<double> hlines;  // dashed reference lines on the left axis
};

namespace detail {

inline std::string fmt(double x, const char* spec = "%.2f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    return (a - lo) / (hi - lo);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  void fit(const std::vector<double>& vals) {
    double a = std::numeric_limits<double>::infinity(), b = -a;
    for (double v : vals)
      if (usable(v)) {
        const double t = log ? std::log10(v) : v;
        a = std::min(a, t);
        b = std::max(b, t);
      }
    if (!std::isfinite(a)) a = 0.0, b = 1.0;
    if (b - a < 1e-12 * std::max(1.0, std::fabs(a))) a -= 0.5, b += 0.5;
    const double pad = 0.05 * (b - a);
    lo = a - pad;
    hi = b + pad;
  }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::ceil(lo); e <= hi; e += std::max(1.0, std::floor((hi - lo) / 6))) t.push_back(std::pow(10.0, e));
      return t;
    }
    const double raw = (hi - lo) / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi; v += step) t.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
    return t;
  }
};

}  // namespace detail

inline std::string render_svg(const Plot& plot) {
  const double W = 720, H = 440, L = 80, R = 80, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  detail::Axis ax{0, 1, plot.logx}, ay{0, 1, plot.logy}, ay2{0, 1, plot.logy_right};
  std::vector<double> xs, ys, ys2;
  for (const auto& s : plot.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    (s.right_axis ? ys2 : ys).insert((s.right_axis ? ys2 : ys).end(), s.y.begin(), s.y.end());
  }
  ys.insert(ys.end(), plot.hlines.begin(), plot.hlines.end());
  ax.fit(xs);
  ay.fit(ys);
  ay2.fit(ys2);
  const auto X = [&](double v) { return L + pw * ax.map(v); };
  const auto Y = [&](const detail::Axis& a, double v) { return T + ph * (1.0 - a.map(v)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  const char* tick_fmt = "%.3g";
  for (double t : ax.ticks()) {
    os << "<line x1=\"" << detail::fmt(X(t)) << "\" y1=\"" << T + ph << "\" x2=\"" << detail::fmt(X(t)) << "\" y2=\""
       << T + ph + 5 << "\" stroke=\"black\"/>";
    os << "<text x=\"" << detail::fmt(X(t)) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">"
       << detail::fmt(t, tick_fmt) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << detail::fmt(Y(ay, t)) << "\" x2=\"" << L << "\" y2=\""
       << detail::fmt(Y(ay, t)) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << L - 8 << "\" y=\"" << detail::fmt(Y(ay, t) + 4) << "\" text-anchor=\"end\">"
       << detail::fmt(t, tick_fmt) << "</text>\n";
  }
  if (!ys2.empty())
    for (double t : ay2.ticks()) {
      os << "<line x1=\"" << L + pw << "\" y1=\"" << detail::fmt(Y(ay2, t)) << "\" x2=\"" << L + pw + 5
         << "\" y2=\"" << detail::fmt(Y(ay2, t)) << "\" stroke=\"black\"/>";
      os << "<text x=\"" << L + pw + 8 << "\" y=\"" << detail::fmt(Y(ay2, t) + 4) << "\">" << detail::fmt(t, tick_fmt)
         << "</text>\n";
    }
  os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << detail::escape(plot.xlabel)
     << "</text>\n";
  os << "<text transform=\"translate(20," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << detail::escape(plot.ylabel) << "</text>\n";
  if (!ys2.empty())
    os << "<text transform=\"translate(" << W - 15 << "," << T + ph / 2 << ") rotate(90)\" text-anchor=\"middle\">"
       << detail::escape(plot.ylabel_right) << "</text>\n";
  for (double h : plot.hlines)
    if (ay.usable(h))
      os << "<line x1=\"" << L << "\" y1=\"" << detail::fmt(Y(ay, h)) << "\" x2=\"" << L + pw << "\" y2=\""
         << detail::fmt(Y(ay, h)) << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";

  double legend_y = T + 14;
  for (const auto& s : plot.series) {
    const auto& a = s.right_axis ? ay2 : ay;
    std::string path;
    bool pen = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !a.usable(s.y[i])) {
        pen = false;
        continue;
      }
      path += (pen ? " L" : " M") + detail::fmt(X(s.x[i])) + " " + detail::fmt(Y(a, s.y[i]));
      pen = true;
      if (s.markers)
        os << "<circle cx=\"" << detail::fmt(X(s.x[i])) << "\" cy=\"" << detail::fmt(Y(a, s.y[i]))
           << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    }
    if (!path.empty())
      os << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n";
    os << "<line x1=\"" << L + 10 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << L + 30 << "\" y2=\"" << legend_y - 4
       << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/><text x=\"" << L + 35 << "\" y=\"" << legend_y << "\">"
       << detail::escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_svg(const Plot& plot, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::InvalidArgument, "cannot write " + path.string());
  os << render_svg(plot);
}

}  // namespace curvlab::io
