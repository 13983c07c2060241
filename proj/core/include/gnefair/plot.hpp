#pragma once

#include <string>
#include <vector>

namespace gnefair::plot {

/// values[g][s] is the bar of series s inside group g.
struct GroupedBars {
  std::string title;
  std::string y_label;
  std::vector<std::string> groups;
  std::vector<std::string> series;
  std::vector<std::vector<double>> values;
};

/// Standalone SVG document. Non-finite values are drawn as missing bars.
std::string grouped_bar_svg(const GroupedBars& chart);

}  // namespace gnefair::plot
