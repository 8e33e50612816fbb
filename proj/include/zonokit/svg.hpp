#pragma once

// Static SVG snapshots in the style of the experiment figures: for a chosen
// step k, the time-update sets (green), safe consistent sets (blue), attacked
// consistent sets (red), the measurement-update members (black outlines), and
// the true state marker. Sets are drawn as outer support polygons; for state
// dimension > 2 a 2 x n projection selects the plane.

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zonokit/estimator.hpp"
#include "zonokit/harness.hpp"
#include "zonokit/setops.hpp"

namespace zonokit {

namespace svg_detail {

struct Shape {
  std::vector<Eigen::Vector2d> polygon;
  std::string stroke;
  std::string fill;
  double fill_opacity;
  double stroke_width;
};

inline std::string render(const std::vector<Shape>& shapes, const Eigen::Vector2d& truth,
                          double lo_x, double hi_x, double lo_y, double hi_y,
                          const std::string& title) {
  const double width = 640, height = 640, margin = 40;
  const double span_x = std::max(hi_x - lo_x, 1e-9);
  const double span_y = std::max(hi_y - lo_y, 1e-9);
  auto sx = [&](double x) { return margin + (x - lo_x) / span_x * (width - 2 * margin); };
  auto sy = [&](double y) { return height - margin - (y - lo_y) / span_y * (height - 2 * margin); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
      << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  for (const auto& s : shapes) {
    out << "<polygon points=\"";
    for (const auto& v : s.polygon) out << sx(v.x()) << "," << sy(v.y()) << " ";
    out << "\" fill=\"" << s.fill << "\" fill-opacity=\"" << s.fill_opacity << "\" stroke=\""
        << s.stroke << "\" stroke-width=\"" << s.stroke_width << "\"/>\n";
  }
  const double tx = sx(truth.x()), ty = sy(truth.y());
  out << "<line x1=\"" << tx - 6 << "\" y1=\"" << ty << "\" x2=\"" << tx + 6 << "\" y2=\"" << ty
      << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  out << "<line x1=\"" << tx << "\" y1=\"" << ty - 6 << "\" x2=\"" << tx << "\" y2=\"" << ty + 6
      << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace svg_detail

/// Renders step k of a report to an SVG file. Consistent sets and time-update
/// sets are recomputed from the recorded measurements and the config echo.
inline void emit_svg_snapshot(const RunReport& report, int k, const std::string& path,
                              std::optional<Matrix> projection = std::nullopt) {
  if (k < 1 || k > static_cast<int>(report.steps.size()))
    throw std::invalid_argument("emit_svg_snapshot: step index out of range");
  SystemModel sys = report.config.build_system();
  sys.state_bound = report.m_bound;
  const int n = sys.state_dim();
  Matrix proj = projection.value_or(Matrix(Matrix::Identity(2, std::max(n, 2))));
  if (proj.rows() != 2 || proj.cols() != n)
    throw std::invalid_argument("emit_svg_snapshot: projection must be 2 x state_dim");

  const StepRecord& rec = report.steps[k - 1];

  // Rebuild the previous collection and roll it one step forward.
  EstimateCollection prev;
  prev.k = k - 1;
  if (k == 1) {
    prev.members.push_back({ConstrainedZonotope(sys.initial_set), {}});
  } else {
    for (const auto& m : report.steps[k - 2].members) prev.members.push_back({m.set, m.provenance});
  }
  const std::vector<ConstrainedZonotope> predicted = time_update(prev, sys, rec.u);

  const int dirs = 64;
  std::vector<svg_detail::Shape> shapes;
  for (const auto& pred : predicted)
    shapes.push_back({support_polygon_2d(pred, proj, dirs), "green", "green", 0.15, 1.0});
  for (std::size_t i = 0; i < rec.sensors.size(); ++i) {
    const Zonotope y = consistent_set(sys.sensors[i], rec.sensors[i].y, report.m_bound);
    const char* color = rec.sensors[i].attacked ? "red" : "blue";
    shapes.push_back(
        {support_polygon_2d(ConstrainedZonotope(y), proj, dirs), color, color, 0.08, 1.0});
  }
  for (const auto& m : rec.members)
    shapes.push_back({support_polygon_2d(m.set, proj, dirs), "black", "none", 0.0, 2.0});

  // Viewport: members plus predictions with padding; the consistent sets are
  // state-bound sized and would dwarf everything, so they get clipped.
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  bool seeded = false;
  auto grow = [&](const ConstrainedZonotope& s) {
    const IntervalBox h = interval_hull(linear_map(proj, s));
    if (!seeded) {
      lo_x = h.lower(0), hi_x = h.upper(0), lo_y = h.lower(1), hi_y = h.upper(1);
      seeded = true;
    } else {
      lo_x = std::min(lo_x, h.lower(0)), hi_x = std::max(hi_x, h.upper(0));
      lo_y = std::min(lo_y, h.lower(1)), hi_y = std::max(hi_y, h.upper(1));
    }
  };
  for (const auto& pred : predicted) grow(pred);
  for (const auto& m : rec.members) grow(m.set);
  const Eigen::Vector2d truth = proj * rec.x_true;
  lo_x = std::min(lo_x, truth.x()), hi_x = std::max(hi_x, truth.x());
  lo_y = std::min(lo_y, truth.y()), hi_y = std::max(hi_y, truth.y());
  const double pad_x = 0.3 * (hi_x - lo_x) + 0.5, pad_y = 0.3 * (hi_y - lo_y) + 0.5;

  std::ostringstream title;
  title << report.config.name << "  k=" << k << "  members=" << rec.members.size();
  const std::string body = svg_detail::render(shapes, truth, lo_x - pad_x, hi_x + pad_x,
                                              lo_y - pad_y, hi_y + pad_y, title.str());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_svg_snapshot: cannot open '" + path + "'");
  out << body;
}

}  // namespace zonokit
