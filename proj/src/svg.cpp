#include "pngsfp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pngsfp {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

}  // namespace

std::string svg_line_chart(const SvgAxes& axes, const std::vector<SvgSeries>& series, int width,
                           int height) {
  const double ml = 64, mr = 16, mt = 34, mb = 46;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (size_t k = 0; k < s.x.size(); ++k) {
      double xv = s.x[k];
      if (axes.log_x && xv <= 0) continue;
      xv = axes.log_x ? std::log10(xv) : xv;
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) {
    if (axes.log_x) x = std::log10(std::max(x, 1e-300));
    return ml + (x - xmin) / (xmax - xmin) * pw;
  };
  auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(axes.title) + "</text>\n";

  // frame and ticks
  svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) + "\" height=\"" +
         num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double gx = ml + pw * k / 4.0;
    const double label = axes.log_x ? std::pow(10.0, fx) : fx;
    svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(gx) + "\" y2=\"" +
           num(mt + ph + 4) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(gx) + "\" y=\"" + num(mt + ph + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + num(label) + "</text>\n";
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    const double gy = mt + ph - ph * k / 4.0;
    svg += "<line x1=\"" + num(ml - 4) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(ml) + "\" y2=\"" +
           num(gy) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(gy + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + num(fy) + "</text>\n";
  }
  svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(height - 8.0) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(axes.xlabel) + "</text>\n";
  svg += "<text x=\"14\" y=\"" + num(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " +
         num(mt + ph / 2) + ")\">" + escape(axes.ylabel) + "</text>\n";

  double ly = mt + 14;
  for (const auto& s : series) {
    std::string pts;
    for (size_t k = 0; k < s.x.size(); ++k) {
      if (axes.log_x && s.x[k] <= 0) continue;
      pts += num(px(s.x[k])) + "," + num(py(s.y[k])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" + num(s.width) +
           "\" points=\"" + pts + "\"/>\n";
    if (!s.label.empty()) {
      svg += "<line x1=\"" + num(ml + pw - 150) + "\" y1=\"" + num(ly) + "\" x2=\"" +
             num(ml + pw - 130) + "\" y2=\"" + num(ly) + "\" stroke=\"" + s.color +
             "\" stroke-width=\"" + num(s.width) + "\"/>\n";
      svg += "<text x=\"" + num(ml + pw - 124) + "\" y=\"" + num(ly + 4) + "\" font-size=\"11\">" +
             escape(s.label) + "</text>\n";
      ly += 16;
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string svg_heatmap(const std::string& title, const std::vector<int>& cells, int nx, int ny,
                        const std::vector<std::string>& colors,
                        const std::vector<std::string>& legend, int width, int height) {
  const double ml = 50, mr = 14, mt = 34, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const double cw = pw / nx, ch = ph / ny;

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(title) + "</text>\n";
  for (int r = 0; r < ny; ++r)
    for (int c = 0; c < nx; ++c) {
      const int v = cells[static_cast<size_t>(r) * nx + c];
      const std::string& fill =
          (v >= 0 && v < static_cast<int>(colors.size())) ? colors[v] : std::string("#999999");
      // row 0 is the bottom of the y axis
      svg += "<rect x=\"" + num(ml + c * cw) + "\" y=\"" + num(mt + (ny - 1 - r) * ch) +
             "\" width=\"" + num(cw + 0.5) + "\" height=\"" + num(ch + 0.5) + "\" fill=\"" + fill +
             "\"/>\n";
    }
  svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) + "\" height=\"" +
         num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  double lx = ml;
  for (size_t v = 0; v < legend.size(); ++v) {
    svg += "<rect x=\"" + num(lx) + "\" y=\"" + num(mt + ph + 16) +
           "\" width=\"12\" height=\"12\" fill=\"" +
           (v < colors.size() ? colors[v] : "#999999") + "\"/>\n";
    svg += "<text x=\"" + num(lx + 16) + "\" y=\"" + num(mt + ph + 26) + "\" font-size=\"11\">" +
           escape(legend[v]) + "</text>\n";
    lx += 24 + 7.0 * legend[v].size();
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace pngsfp
