#pragma once

#include <string>
#include <vector>

namespace gridres {

/// Self-contained SVG line chart (no display dependency).
void write_svg_line_plot(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<double>& xs,
                         const std::vector<double>& ys);

}  // namespace gridres
