#include "groove/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace groove::svg {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

std::string tick_label(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buffer;
}

struct Range {
  double lo;
  double hi;
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo) * 0.1);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string escape_xml(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string palette_color(std::size_t index) {
  static constexpr std::array<const char*, 8> kPalette = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return kPalette[index % kPalette.size()];
}

std::string render_scatter(const ScatterSpec& spec) {
  double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
  if (!spec.points.empty()) {
    const auto [xmin, xmax] = std::minmax_element(spec.points.begin(), spec.points.end(),
                                                  [](const Point& a, const Point& b) { return a.x < b.x; });
    const auto [ymin, ymax] = std::minmax_element(spec.points.begin(), spec.points.end(),
                                                  [](const Point& a, const Point& b) { return a.y < b.y; });
    xlo = xmin->x, xhi = xmax->x, ylo = ymin->y, yhi = ymax->y;
  }
  if (spec.identity_line) {
    xlo = ylo = std::min(xlo, ylo);
    xhi = yhi = std::max(xhi, yhi);
  }
  const Range xr = padded(xlo, xhi);
  const Range yr = padded(ylo, yhi);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto sy = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  if (!spec.comment.empty()) out += "<!-- " + escape_xml(spec.comment) + " -->\n";
  out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         escape_xml(spec.title) + "</text>\n";
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    out += "<line x1=\"" + num(sx(xv)) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(sx(xv)) + "\" y2=\"" +
           num(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + tick_label(xv) + "</text>\n";
    out += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(sy(yv)) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(sy(yv)) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(sy(yv) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + tick_label(yv) + "</text>\n";
  }
  out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 15) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape_xml(spec.x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " +
         num(kTop + plot_h / 2) + ")\">" + escape_xml(spec.y_label) + "</text>\n";

  if (spec.identity_line) {
    const double lo = std::max(xr.lo, yr.lo);
    const double hi = std::min(xr.hi, yr.hi);
    out += "<line x1=\"" + num(sx(lo)) + "\" y1=\"" + num(sy(lo)) + "\" x2=\"" + num(sx(hi)) + "\" y2=\"" + num(sy(hi)) +
           "\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (const Point& p : spec.points) {
    out += "<circle cx=\"" + num(sx(p.x)) + "\" cy=\"" + num(sy(p.y)) + "\" r=\"4\" fill=\"" + p.color +
           "\" fill-opacity=\"0.8\">";
    if (!p.tooltip.empty()) out += "<title>" + escape_xml(p.tooltip) + "</title>";
    out += "</circle>\n";
  }
  for (std::size_t i = 0; i < spec.legend.size(); ++i) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(i);
    out += "<circle cx=\"" + num(kWidth - kRight + 20) + "\" cy=\"" + num(y) + "\" r=\"5\" fill=\"" +
           spec.legend[i].color + "\"/>\n";
    out += "<text x=\"" + num(kWidth - kRight + 30) + "\" y=\"" + num(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + escape_xml(spec.legend[i].label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace groove::svg
