#include "crbm/svg.hpp"

#include "crbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace crbm {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string render_svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& o) {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = o.width - left - right, ph = o.height - top - bottom;
  auto ty = [&](double y) { return o.log_y ? std::log10(y) : y; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (o.log_y && !(s.y[i] > 0.0)) continue;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (o.log_y) {
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << o.width << "\" height=\""
      << o.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(o.width / 2.0) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << esc(o.title)
      << "</text>\n";
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  const int ny = o.log_y ? static_cast<int>(y1 - y0) : 5;
  for (int i = 0; i <= ny; ++i) {
    const double v = y0 + (y1 - y0) * i / ny;
    const double yy = py(v);
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(yy) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
        << fmt(yy) << "\" stroke=\"#dddddd\"/>\n";
    const std::string label = o.log_y ? "1e" + std::to_string(static_cast<int>(std::lround(v))) : tick_label(v);
    svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(yy + 4) << "\" text-anchor=\"end\">" << label
        << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = x0 + (x1 - x0) * i / 5;
    svg << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(top + ph + 16) << "\" text-anchor=\"middle\">"
        << tick_label(v) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(o.height - 10.0) << "\" text-anchor=\"middle\">"
      << esc(o.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt(top + ph / 2) << ")\">" << esc(o.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (o.log_y && !(s.y[i] > 0.0)) continue;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts << fmt(px(s.x[i])) << ',' << fmt(py(ty(s.y[i]))) << ' ';
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
        << "\"/>\n";
    const double ly = top + 14 + 16.0 * k;
    svg << "<line x1=\"" << fmt(left + pw - 150) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + pw - 130)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(left + pw - 125) << "\" y=\"" << fmt(ly + 4) << "\">" << esc(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series, const PlotOptions& opts) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("svg: cannot open '" + path + "'");
  f << render_svg_plot(series, opts);
}

}  // namespace crbm
