#pragma once

#include <string>
#include <vector>

namespace sbpg::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static SVG line chart with one polyline and legend entry per series.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

/// One panel per metric, one bar per variant inside each panel.
struct BarPanel {
  std::string metric;
  std::vector<double> values;  // aligned with the variant list
};

std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& variants,
                          const std::vector<BarPanel>& panels);

}  // namespace sbpg::cli
