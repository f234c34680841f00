#pragma once

#include <string>
#include <vector>

namespace crbm {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = true;
  int width = 640;
  int height = 420;
};

// Line plot with axes, decade ticks on a log axis and a legend. Nonpositive
// values are dropped from log-scale series.
std::string render_svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opts);
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series, const PlotOptions& opts);

}  // namespace crbm
