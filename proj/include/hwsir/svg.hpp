#ifndef HWSIR_SVG_HPP
#define HWSIR_SVG_HPP

#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hwsir/analysis.hpp"

namespace hwsir {

// Minimal native line plot: axes, series polylines, legend. No dependency.
class SvgPlot {
 public:
  SvgPlot(int width = 720, int height = 480) : width_(width), height_(height) {}

  void add_series(const TimeSeries& s, const std::string& label,
                  const std::string& color, double opacity = 1.0) {
    series_.push_back({s, label, color, opacity});
  }

  void write(std::ostream& os) const {
    double x_min = 1e300, x_max = -1e300, y_min = 0.0, y_max = -1e300;
    for (const auto& sr : series_) {
      for (double t : sr.data.t) {
        x_min = std::min(x_min, t);
        x_max = std::max(x_max, t);
      }
      for (double v : sr.data.v) y_max = std::max(y_max, v);
    }
    if (x_max <= x_min) x_max = x_min + 1.0;
    if (y_max <= y_min) y_max = y_min + 1.0;
    y_max *= 1.05;

    const double ml = 60, mr = 20, mt = 20, mb = 45;
    double pw = width_ - ml - mr, ph = height_ - mt - mb;
    auto px = [&](double t) { return ml + (t - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double v) { return mt + ph - (v - y_min) / (y_max - y_min) * ph; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
       << "\" height=\"" << height_ << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
       << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << mt + ph << "\" stroke=\"black\"/>\n";
    for (int j = 0; j <= 5; ++j) {
      double t = x_min + (x_max - x_min) * j / 5;
      double v = y_min + (y_max - y_min) * j / 5;
      os << "<text x=\"" << px(t) << "\" y=\"" << mt + ph + 18
         << "\" font-size=\"11\" text-anchor=\"middle\">" << round3(t) << "</text>\n";
      os << "<text x=\"" << ml - 6 << "\" y=\"" << py(v) + 4
         << "\" font-size=\"11\" text-anchor=\"end\">" << round3(v) << "</text>\n";
    }
    for (const auto& sr : series_) {
      os << "<polyline fill=\"none\" stroke=\"" << sr.color
         << "\" stroke-opacity=\"" << sr.opacity << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t j = 0; j < sr.data.t.size(); ++j)
        os << px(sr.data.t[j]) << ',' << py(sr.data.v[j]) << ' ';
      os << "\"/>\n";
    }
    double ly = mt + 14;
    for (const auto& sr : series_) {
      if (sr.label.empty()) continue;
      os << "<line x1=\"" << ml + pw - 140 << "\" y1=\"" << ly << "\" x2=\""
         << ml + pw - 115 << "\" y2=\"" << ly << "\" stroke=\"" << sr.color
         << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << ml + pw - 108 << "\" y=\"" << ly + 4
         << "\" font-size=\"12\">" << sr.label << "</text>\n";
      ly += 18;
    }
    os << "</svg>\n";
  }

 private:
  static std::string round3(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << v;
    return ss.str();
  }

  struct Series {
    TimeSeries data;
    std::string label, color;
    double opacity;
  };
  int width_, height_;
  std::vector<Series> series_;
};

}  // namespace hwsir

#endif
