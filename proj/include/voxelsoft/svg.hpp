#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "voxelsoft/common.hpp"

namespace voxelsoft {

// Minimal self-contained SVG line chart: series polylines with optional
// min/max bands and a text legend. Output is plain deterministic text.
struct SvgSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> band_lo;  // optional, same length as xs
  std::vector<double> band_hi;
};

namespace detail {

inline std::string svg_num(double v) {
  // fixed precision keeps coordinates compact
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

inline std::string render_line_chart(const std::string& title,
                                     const std::string& x_label,
                                     const std::string& y_label,
                                     const std::vector<SvgSeries>& series,
                                     int width = 800, int height = 480) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  const int n_colors = 6;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  auto grow = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (first) {
      xmin = xmax = x;
      ymin = ymax = y;
      first = false;
    } else {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  };
  for (const SvgSeries& s : series) {
    for (size_t k = 0; k < s.xs.size(); ++k) {
      grow(s.xs[k], s.ys[k]);
      if (k < s.band_lo.size()) grow(s.xs[k], s.band_lo[k]);
      if (k < s.band_hi.size()) grow(s.xs[k], s.band_hi[k]);
    }
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) {
    return mt + ph - (y - ymin) / (ymax - ymin) * ph;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::svg_num(width / 2.0) +
         "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" +
         title + "</text>\n";

  // axes
  out += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" +
         detail::svg_num(mt) + "\" x2=\"" + detail::svg_num(ml) + "\" y2=\"" +
         detail::svg_num(mt + ph) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" +
         detail::svg_num(mt + ph) + "\" x2=\"" + detail::svg_num(ml + pw) +
         "\" y2=\"" + detail::svg_num(mt + ph) + "\" stroke=\"black\"/>\n";

  // ticks
  for (int k = 0; k <= 4; ++k) {
    double fx = xmin + (xmax - xmin) * k / 4.0;
    double fy = ymin + (ymax - ymin) * k / 4.0;
    out += "<text x=\"" + detail::svg_num(px(fx)) + "\" y=\"" +
           detail::svg_num(mt + ph + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           format_double(std::round(fx * 1000) / 1000) + "</text>\n";
    out += "<text x=\"" + detail::svg_num(ml - 6) + "\" y=\"" +
           detail::svg_num(py(fy) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           format_double(std::round(fy * 1000) / 1000) + "</text>\n";
  }
  out += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" +
         detail::svg_num(height - 12.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" +
         x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::svg_num(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 " +
         detail::svg_num(mt + ph / 2) + ")\">" + y_label + "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    const SvgSeries& sr = series[s];
    const char* color = kPalette[s % n_colors];
    if (sr.band_lo.size() == sr.xs.size() &&
        sr.band_hi.size() == sr.xs.size() && sr.xs.size() > 1) {
      std::string pts;
      for (size_t k = 0; k < sr.xs.size(); ++k) {
        pts += detail::svg_num(px(sr.xs[k])) + "," +
               detail::svg_num(py(sr.band_hi[k])) + " ";
      }
      for (size_t k = sr.xs.size(); k-- > 0;) {
        pts += detail::svg_num(px(sr.xs[k])) + "," +
               detail::svg_num(py(sr.band_lo[k])) + " ";
      }
      out += "<polygon points=\"" + pts + "\" fill=\"" + color +
             "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    if (sr.xs.size() == 1) {
      out += "<circle cx=\"" + detail::svg_num(px(sr.xs[0])) + "\" cy=\"" +
             detail::svg_num(py(sr.ys[0])) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    } else {
      std::string pts;
      for (size_t k = 0; k < sr.xs.size(); ++k) {
        pts += detail::svg_num(px(sr.xs[k])) + "," +
               detail::svg_num(py(sr.ys[k])) + " ";
      }
      out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
             color + "\" stroke-width=\"1.5\"/>\n";
    }
    double ly = mt + 14.0 * double(s);
    out += "<line x1=\"" + detail::svg_num(ml + pw - 130) + "\" y1=\"" +
           detail::svg_num(ly) + "\" x2=\"" + detail::svg_num(ml + pw - 110) +
           "\" y2=\"" + detail::svg_num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::svg_num(ml + pw - 105) + "\" y=\"" +
           detail::svg_num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + sr.label +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace voxelsoft
