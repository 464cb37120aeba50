// Minimal SVG line plot of a SpectrumCurve.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "selfsim/spectrum.hpp"

namespace selfsim {

inline std::string curve_to_svg(const SpectrumCurve& c, const std::string& title = {}) {
  constexpr double width = 480.0;
  constexpr double height = 320.0;
  constexpr double margin = 48.0;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"320\" viewBox=\"0 0 480 320\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) out += "<text x=\"240\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  out += "<text x=\"240\" y=\"312\" text-anchor=\"middle\" font-size=\"12\">" + c.x_label + "</text>\n";
  out += "<text x=\"12\" y=\"160\" font-size=\"12\" transform=\"rotate(-90 12 160)\" text-anchor=\"middle\">" +
         c.y_label + "</text>\n";
  if (c.x.empty()) return out + "</svg>\n";

  auto [xlo, xhi] = std::minmax_element(c.x.begin(), c.x.end());
  auto [ylo, yhi] = std::minmax_element(c.y.begin(), c.y.end());
  double x0 = *xlo, x1 = *xhi, y0 = *ylo, y1 = *yhi;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
  auto py = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

  out += "<rect x=\"48\" y=\"48\" width=\"384\" height=\"224\" fill=\"none\" stroke=\"#888\"/>\n";
  out += "<text x=\"48\" y=\"288\" font-size=\"10\">" + num(x0) + "</text>\n";
  out += "<text x=\"432\" y=\"288\" font-size=\"10\" text-anchor=\"end\">" + num(x1) + "</text>\n";
  out += "<text x=\"44\" y=\"272\" font-size=\"10\" text-anchor=\"end\">" + num(y0) + "</text>\n";
  out += "<text x=\"44\" y=\"52\" font-size=\"10\" text-anchor=\"end\">" + num(y1) + "</text>\n";
  out += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < c.x.size(); ++k) out += num(px(c.x[k])) + "," + num(py(c.y[k])) + " ";
  out += "\"/>\n";
  for (std::size_t k = 0; k < c.x.size(); ++k) {
    out += "<circle cx=\"" + num(px(c.x[k])) + "\" cy=\"" + num(py(c.y[k])) + "\" r=\"2\" fill=\"#1f5fa8\"/>\n";
  }
  return out + "</svg>\n";
}

}  // namespace selfsim
