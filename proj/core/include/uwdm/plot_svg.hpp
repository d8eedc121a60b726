#pragma once

#include <string>
#include <vector>

namespace uwdm {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Writes a simple self-contained line chart. Output is deterministic for
// identical inputs. Non-finite samples are dropped from their series.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series,
                          int width = 900, int height = 560);

}  // namespace uwdm
