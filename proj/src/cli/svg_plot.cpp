#include "sbpg/cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sbpg::cli {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12) {
      const double pad = std::max(1e-6, std::abs(hi) * 0.05);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
  const double w = 640, h = 400, left = 70, right = 150, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  auto sx = [&](double v) { return left + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double v) { return top + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    o << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << sy(yv) << "\" y2=\""
      << sy(yv) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
      << num(yv) << "</text>\n";
    o << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << num(xv) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << top + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t p = 0; p < std::min(s.x.size(), s.y.size()); ++p) {
      o << sx(s.x[p]) << ',' << sy(s.y[p]) << ' ';
    }
    o << "\"/>\n";
    for (std::size_t p = 0; p < std::min(s.x.size(), s.y.size()); ++p) {
      o << "<circle cx=\"" << sx(s.x[p]) << "\" cy=\"" << sy(s.y[p]) << "\" r=\"3\" fill=\""
        << color << "\"/>\n";
    }
    const double ly = top + 14 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    o << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& variants,
                          const std::vector<BarPanel>& panels) {
  const double panel_w = 220, h = 360, top = 50, bottom = 60, gap = 30, left = 20;
  const double w = left * 2 + panels.size() * panel_w + (panels.empty() ? 0 : (panels.size() - 1) * gap);
  const double ph = h - top - bottom;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double x0 = left + p * (panel_w + gap);
    double hi = 0.0;
    for (double v : panels[p].values) {
      if (std::isfinite(v)) hi = std::max(hi, std::abs(v));
    }
    if (hi <= 0.0) hi = 1.0;
    o << "<text x=\"" << x0 + panel_w / 2 << "\" y=\"" << top - 8
      << "\" text-anchor=\"middle\" font-weight=\"bold\">" << escape(panels[p].metric)
      << "</text>\n";
    o << "<line x1=\"" << x0 << "\" x2=\"" << x0 + panel_w << "\" y1=\"" << top + ph << "\" y2=\""
      << top + ph << "\" stroke=\"#444\"/>\n";
    const double bw = panel_w / (variants.size() * 1.5 + 0.5);
    for (std::size_t v = 0; v < variants.size() && v < panels[p].values.size(); ++v) {
      const double value = panels[p].values[v];
      const double bh = std::isfinite(value) ? std::abs(value) / hi * ph : 0.0;
      const double bx = x0 + bw * 0.5 + v * bw * 1.5;
      o << "<rect x=\"" << bx << "\" y=\"" << top + ph - bh << "\" width=\"" << bw
        << "\" height=\"" << bh << "\" fill=\"" << kPalette[v % std::size(kPalette)] << "\"/>\n";
      o << "<text x=\"" << bx + bw / 2 << "\" y=\"" << top + ph - bh - 4
        << "\" text-anchor=\"middle\" font-size=\"10\">" << num(value) << "</text>\n";
      o << "<text x=\"" << bx + bw / 2 << "\" y=\"" << top + ph + 16
        << "\" text-anchor=\"middle\">" << escape(variants[v]) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace sbpg::cli
