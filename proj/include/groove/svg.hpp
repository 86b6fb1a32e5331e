#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace groove::svg {

struct Point {
  double x = 0.0;
  double y = 0.0;
  std::string color = "#1f77b4";
  std::string tooltip;
};

struct Legend {
  std::string label;
  std::string color;
};

struct ScatterSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Point> points;
  std::vector<Legend> legend;
  bool identity_line = false;
  // Inserted as an XML comment after the root element.
  std::string comment;
};

// Static 640x480 scatter with axes, ticks and optional y = x line. Output is a
// pure function of the spec.
std::string render_scatter(const ScatterSpec& spec);

// Fixed categorical palette, cycled by index.
std::string palette_color(std::size_t index);

std::string escape_xml(std::string_view text);

}  // namespace groove::svg
