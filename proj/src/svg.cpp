#include "mapforge/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace mapforge {

namespace {

const char* class_color(ElementClass cls) {
  switch (cls) {
    case ElementClass::ped_crossing:
      return "#ff7f0e";
    case ElementClass::divider:
      return "#1f77b4";
    case ElementClass::boundary:
      return "#2ca02c";
    case ElementClass::centerline:
      return "#9467bd";
  }
  return "#000000";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// SVG y grows downward; mirror y within the range box.
std::string points_attr(const std::vector<Point>& pts,
                        const PerceptionRange& r) {
  std::string out;
  for (const auto& p : pts) {
    if (!out.empty()) out += ' ';
    out += fmt(p.x) + "," + fmt(r.y_max + r.y_min - p.y);
  }
  return out;
}

void append_element(std::string& svg, const MapElement& e,
                    const PerceptionRange& r, bool dashed, double opacity) {
  const char* tag = e.closed ? "polygon" : "polyline";
  svg += "  <";
  svg += tag;
  svg += " points=\"" + points_attr(e.points, r) + "\"";
  svg += " fill=\"none\" stroke=\"";
  svg += class_color(e.cls);
  svg += "\" stroke-width=\"0.25\"";
  if (dashed) svg += " stroke-dasharray=\"0.8,0.5\"";
  if (opacity < 1.0) svg += " stroke-opacity=\"" + fmt(opacity) + "\"";
  svg += "/>\n";
}

}  // namespace

std::string render_svg(const Scene& gt,
                       const std::vector<ScoredElement>& preds) {
  const auto& r = gt.range;
  const double w = r.x_max - r.x_min;
  const double h = r.y_max - r.y_min;
  std::string svg =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" +
      fmt(r.x_min) + " " + fmt(r.y_min) + " " + fmt(w) + " " + fmt(h) +
      "\" width=\"600\" height=\"" + fmt(600.0 * h / w) + "\">\n";
  svg += "  <rect x=\"" + fmt(r.x_min) + "\" y=\"" + fmt(r.y_min) +
         "\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
         "\" fill=\"#fafafa\" stroke=\"#cccccc\" stroke-width=\"0.1\"/>\n";
  for (const auto& e : gt.elements) append_element(svg, e, r, false, 1.0);
  for (const auto& se : preds)
    append_element(svg, se.element, r, true,
                   std::clamp(se.score, 0.15, 1.0));
  svg += "</svg>\n";
  return svg;
}

}  // namespace mapforge
