#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wetsim {

struct SvgSeries {
  std::string label;
  std::vector<double> y;
};

// Minimal static line chart: shared x axis, one polyline per series, legend
// in the top-right corner.
void write_line_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                      const std::vector<double>& x, const std::vector<SvgSeries>& series);

}  // namespace wetsim
