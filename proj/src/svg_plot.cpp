#include "gridres/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gridres/errors.hpp"

namespace gridres {

void write_svg_line_plot(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  if (xs.empty() || xs.size() != ys.size())
    throw Error("svg plot: no data");

  const double width = 640, height = 420;
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = *std::min_element(xs.begin(), xs.end());
  double x_max = *std::max_element(xs.begin(), xs.end());
  double y_min = *std::min_element(ys.begin(), ys.end());
  double y_max = *std::max_element(ys.begin(), ys.end());
  if (x_max - x_min < 1e-12) { x_min -= 0.5; x_max += 0.5; }
  if (y_max - y_min < 1e-12) { y_min -= 0.5; y_max += 0.5; }

  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::ofstream out(path);
  if (!out) throw Error("svg plot: cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
      << left + plot_w << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";

  // tick labels at the extremes
  out << "<text x=\"" << left << "\" y=\"" << height - 28
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << x_min << "</text>\n";
  out << "<text x=\"" << left + plot_w << "\" y=\"" << height - 28
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << x_max << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + plot_h
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << y_min << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + 10
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << y_max << "</text>\n";

  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">" << y_label
      << "</text>\n";

  out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out << ' ';
    out << px(xs[i]) << ',' << py(ys[i]);
  }
  out << "\"/>\n</svg>\n";
}

}  // namespace gridres
