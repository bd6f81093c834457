#include "wetsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wetsim {

void write_line_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                      const std::vector<double>& x, const std::vector<SvgSeries>& series) {
  const int W = 720, H = 480, ml = 70, mr = 160, mt = 50, mb = 50;
  const double pw = W - ml - mr, ph = H - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (double v : x) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  for (const auto& s : series)
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto px = [&](double v) { return ml + pw * (v - xmin) / (xmax - xmin); };
  const auto py = [&](double v) { return mt + ph * (1.0 - (v - ymin) / (ymax - ymin)); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
  out << "<text x=\"" << (ml + pw / 2) << "\" y=\"" << (H - 12)
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";

  char buf[256];
  // Axes and tick labels.
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">%g</text>\n", px(xv),
                  H - mb + 18, xv);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n", ml - 6,
                  py(yv) + 4.0, yv);
    out << buf;
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < series[s].y.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x[i]), py(series[s].y[i]));
      out << buf;
    }
    out << "\"/>\n";
    const int ly = mt + 16 + static_cast<int>(s) * 18;
    out << "<line x1=\"" << (W - mr + 10) << "\" y1=\"" << ly << "\" x2=\"" << (W - mr + 34)
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << (W - mr + 40) << "\" y=\"" << (ly + 4) << "\">" << series[s].label
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace wetsim
