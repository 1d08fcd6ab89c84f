#pragma once

#include <string>
#include <vector>

namespace pngsfp {

// Static SVG 1.1 renderings. Plots are derived views; CSV stays canonical.

struct SvgSeries {
  std::string label;
  std::string color;
  double width = 1.5;
  std::vector<double> x, y;
};

struct SvgAxes {
  std::string title, xlabel, ylabel;
  bool log_x = false;
};

std::string svg_line_chart(const SvgAxes& axes, const std::vector<SvgSeries>& series,
                           int width = 760, int height = 460);

// Row-major cell values in [0, n_labels); one fill color per label.
std::string svg_heatmap(const std::string& title, const std::vector<int>& cells, int nx, int ny,
                        const std::vector<std::string>& colors,
                        const std::vector<std::string>& legend, int width = 520, int height = 520);

}  // namespace pngsfp
