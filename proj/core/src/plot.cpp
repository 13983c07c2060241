#include "gnefair/plot.hpp"

#include <algorithm>
#include <cmath>

#include "gnefair/csv.hpp"
#include "gnefair/errors.hpp"

namespace gnefair::plot {

namespace {

constexpr const char* kPalette[] = {"#4C72B0", "#DD8452", "#55A868", "#C44E52",
                                    "#8172B3", "#937860"};

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) { return csv::format_number(std::round(v * 100.0) / 100.0); }

}  // namespace

std::string grouped_bar_svg(const GroupedBars& chart) {
  if (chart.values.size() != chart.groups.size())
    throw InvalidArgument("one value row per group is required");
  for (const auto& row : chart.values)
    if (row.size() != chart.series.size())
      throw InvalidArgument("one value per series is required");

  const double width = 120.0 + 90.0 * std::max<std::size_t>(1, chart.groups.size());
  const double height = 360.0;
  const double left = 70.0, right = 20.0, top = 40.0, bottom = 70.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double lo = 0.0, hi = 0.0;
  for (const auto& row : chart.values)
    for (double v : row)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (hi - lo <= 0.0) hi = lo + 1.0;
  const auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(chart.title) + "</text>\n";
  svg += "<text transform=\"translate(16," + num(top + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(chart.y_label) + "</text>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + num(left) + "\" x2=\"" + num(left + plot_w) + "\" y1=\"" + num(y) +
           "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(left - 6) + "\" y=\"" + num(y + 4) +
           "\" text-anchor=\"end\">" + csv::format_number(std::round(v * 1e4) / 1e4) +
           "</text>\n";
  }
  svg += "<line x1=\"" + num(left) + "\" x2=\"" + num(left + plot_w) + "\" y1=\"" +
         num(y_of(0.0)) + "\" y2=\"" + num(y_of(0.0)) + "\" stroke=\"black\"/>\n";

  const double group_w = plot_w / std::max<std::size_t>(1, chart.groups.size());
  const double bar_w = 0.8 * group_w / std::max<std::size_t>(1, chart.series.size());
  for (std::size_t g = 0; g < chart.groups.size(); ++g) {
    const double gx = left + g * group_w + 0.1 * group_w;
    for (std::size_t s = 0; s < chart.series.size(); ++s) {
      const double v = chart.values[g][s];
      if (!std::isfinite(v)) continue;
      const double y0 = y_of(std::max(v, 0.0));
      const double y1 = y_of(std::min(v, 0.0));
      svg += "<rect x=\"" + num(gx + s * bar_w) + "\" y=\"" + num(y0) + "\" width=\"" +
             num(bar_w) + "\" height=\"" + num(std::max(y1 - y0, 0.0)) + "\" fill=\"" +
             kPalette[s % std::size(kPalette)] + "\"/>\n";
    }
    svg += "<text x=\"" + num(gx + 0.4 * group_w) + "\" y=\"" + num(top + plot_h + 16) +
           "\" text-anchor=\"middle\">" + escape(chart.groups[g]) + "</text>\n";
  }
  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const double x = left + 90.0 * s;
    const double y = height - 22.0;
    svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
           kPalette[s % std::size(kPalette)] + "\"/>\n";
    svg += "<text x=\"" + num(x + 14) + "\" y=\"" + num(y) + "\">" + escape(chart.series[s]) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace gnefair::plot
