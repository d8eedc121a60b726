#include "uwdm/plot_svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace uwdm {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Axis {
  double lo = 0, hi = 1, step = 1;
};

// round limits outward to a 1/2/5 tick pitch
Axis nice_axis(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  double raw = (hi - lo) / 6.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double pitch = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  Axis a;
  a.step = pitch * mag;
  a.lo = std::floor(lo / a.step) * a.step;
  a.hi = std::ceil(hi / a.step) * a.step;
  return a;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series, int width,
                          int height) {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool any = false;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("write_line_chart_svg: series '" + s.label +
                                  "' has mismatched x/y lengths");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!any) {
        x_min = x_max = s.x[i];
        y_min = y_max = s.y[i];
        any = true;
      } else {
        x_min = std::min(x_min, s.x[i]);
        x_max = std::max(x_max, s.x[i]);
        y_min = std::min(y_min, s.y[i]);
        y_max = std::max(y_max, s.y[i]);
      }
    }
  }

  Axis xa = nice_axis(x_min, x_max);
  Axis ya = nice_axis(y_min, y_max);

  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - xa.lo) / (xa.hi - xa.lo) * pw; };
  auto py = [&](double y) {
    return mt + ph - (y - ya.lo) / (ya.hi - ya.lo) * ph;
  };

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("write_line_chart_svg: cannot open '" + path +
                             "'");

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape(title)
      << "</text>\n";

  // grid and ticks
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t = xa.lo; t <= xa.hi + 0.5 * xa.step; t += xa.step) {
    double x = px(t);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(mt) << "\" x2=\""
        << num(x) << "\" y2=\"" << num(mt + ph)
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(mt + ph + 16)
        << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t = ya.lo; t <= ya.hi + 0.5 * ya.step; t += ya.step) {
    double y = py(t);
    out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(ml + pw) << "\" y2=\"" << num(y)
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  out << "</g>\n";

  out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\""
      << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << num(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << num(mt + ph / 2) << ")\">" << escape(y_label) << "</text>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(*kPalette))];
    std::string pts;
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    if (!pts.empty())
      out << "<polyline points=\"" << pts
          << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\"/>\n";
    double ly = mt + 16 + 16 * static_cast<double>(k);
    out << "<line x1=\"" << num(ml + 10) << "\" y1=\"" << num(ly - 4)
        << "\" x2=\"" << num(ml + 34) << "\" y2=\"" << num(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
    out << "<text x=\"" << num(ml + 40) << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out)
    throw std::runtime_error("write_line_chart_svg: write to '" + path +
                             "' failed");
}

}  // namespace uwdm
