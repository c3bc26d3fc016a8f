#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "matmat/harness.hpp"

namespace matmat {

double ChartLayout::map_x(double x) const {
  const double lo = log_x ? std::log10(x_min) : x_min;
  const double hi = log_x ? std::log10(x_max) : x_max;
  const double v = log_x ? std::log10(x) : x;
  if (hi == lo) return left + width / 2.0;
  return left + width * (v - lo) / (hi - lo);
}

double ChartLayout::map_y(double y) const {
  if (y_max == y_min) return top + height / 2.0;
  return top + height * (1.0 - (y - y_min) / (y_max - y_min));
}

ChartLayout fit_layout(const std::vector<ChartSeries>& series, bool log_x) {
  ChartLayout layout;
  layout.log_x = log_x;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      x_lo = std::min(x_lo, s.x[k]);
      x_hi = std::max(x_hi, s.x[k]);
      y_lo = std::min(y_lo, s.y[k]);
      y_hi = std::max(y_hi, s.y[k]);
    }
  }
  if (std::isfinite(x_lo)) {
    layout.x_min = x_lo;
    layout.x_max = x_hi;
    layout.y_min = y_lo;
    layout.y_max = y_hi;
  }
  return layout;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<ChartSeries>& series, bool log_x) {
  const ChartLayout L = fit_layout(series, log_x);
  const double right = L.left + L.width;
  const double bottom = L.top + L.height;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(L.canvas_width) + "\" height=\"" +
         num(L.canvas_height) + "\" viewBox=\"0 0 " + num(L.canvas_width) + " " + num(L.canvas_height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(L.canvas_width) + "\" height=\"" + num(L.canvas_height) +
         "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(L.canvas_width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(title) + "</text>\n";

  // axes
  svg += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + num(L.left) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(right) + "\" y2=\"" + num(bottom) +
         "\"/>\n";
  svg += "<line x1=\"" + num(L.left) + "\" y1=\"" + num(L.top) + "\" x2=\"" + num(L.left) + "\" y2=\"" + num(bottom) +
         "\"/>\n";
  svg += "</g>\n";

  // x ticks at every distinct abscissa
  std::vector<double> xs;
  for (const auto& s : series) {
    for (double x : s.x) {
      if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
  }
  std::sort(xs.begin(), xs.end());
  svg += "<g class=\"x-ticks\" text-anchor=\"middle\">\n";
  for (double x : xs) {
    const double px = L.map_x(x);
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(px) + "\" y2=\"" +
           num(bottom + 5) + "\" stroke=\"black\"/>";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(bottom + 18) + "\">" + label_num(x) + "</text>\n";
  }
  svg += "</g>\n";

  svg += "<g class=\"y-ticks\" text-anchor=\"end\">\n";
  const int n_yticks = L.y_max == L.y_min ? 1 : 5;
  for (int k = 0; k < n_yticks; ++k) {
    const double y = n_yticks == 1 ? L.y_min : L.y_min + (L.y_max - L.y_min) * k / (n_yticks - 1);
    const double py = L.map_y(y);
    svg += "<line x1=\"" + num(L.left - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(L.left) + "\" y2=\"" + num(py) +
           "\" stroke=\"black\"/>";
    svg += "<text x=\"" + num(L.left - 8) + "\" y=\"" + num(py + 4) + "\">" + label_num(y) + "</text>\n";
  }
  svg += "</g>\n";

  svg += "<text x=\"" + num(L.left + L.width / 2) + "\" y=\"" + num(bottom + 40) + "\" text-anchor=\"middle\">" +
         escape(x_label) + (log_x ? " (log scale)" : "") + "</text>\n";
  svg += "<text x=\"20\" y=\"" + num(L.top + L.height / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         num(L.top + L.height / 2) + ")\">" + escape(y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points;
    for (std::size_t k = 0; k < series[s].x.size(); ++k) {
      if (!std::isfinite(series[s].y[k])) continue;
      if (!points.empty()) points += ' ';
      points += num(L.map_x(series[s].x[k])) + ',' + num(L.map_y(series[s].y[k]));
    }
    svg += "<polyline data-series=\"" + escape(series[s].label) + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
  }

  svg += "<g class=\"legend\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = L.top + 10 + 20.0 * static_cast<double>(s);
    const double lx = right + 20;
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + kPalette[s % std::size(kPalette)] + "\" stroke-width=\"2\"/>";
    svg += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) + "\">" + escape(series[s].label) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace matmat
