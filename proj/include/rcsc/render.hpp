#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "rcsc/complex.hpp"
#include "rcsc/geometry.hpp"
#include "rcsc/space.hpp"

namespace rcsc {

inline constexpr int kArcSamples = 24;

namespace detail {

inline constexpr double kCanvas = 480.0;
inline constexpr double kDiskRadius = 220.0;

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::array<double, 2> to_canvas(const PoincarePoint& p) {
  return {0.5 * kCanvas + kDiskRadius * p[0], 0.5 * kCanvas - kDiskRadius * p[1]};
}

inline std::string svg_header() {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\"" << kCanvas
     << "\" viewBox=\"0 0 " << kCanvas << ' ' << kCanvas << "\">\n";
  os << "<circle class=\"boundary\" cx=\"" << fmt(0.5 * kCanvas) << "\" cy=\"" << fmt(0.5 * kCanvas) << "\" r=\""
     << fmt(kDiskRadius) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  return os.str();
}

inline std::string polyline_points(const std::vector<PoincarePoint>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = to_canvas(pts[i]);
    s += (i ? " " : "") + fmt(c[0]) + "," + fmt(c[1]);
  }
  return s;
}

}  // namespace detail

/// Samples of the geodesic segment from a to b in the Poincaré disk, endpoints
/// included. Segments on a line through the origin are straight chords; all
/// others are arcs of the circle through a and b orthogonal to the unit circle.
inline std::vector<PoincarePoint> geodesic_segment(const PoincarePoint& a, const PoincarePoint& b,
                                                   int samples = kArcSamples) {
  std::vector<PoincarePoint> out;
  const double cross = a[0] * b[1] - a[1] * b[0];
  const double scale = std::max({std::hypot(a[0], a[1]), std::hypot(b[0], b[1]), 1e-300});
  if (std::abs(cross) <= 1e-12 * scale * scale) {
    for (int i = 0; i <= samples; ++i) {
      const double s = static_cast<double>(i) / samples;
      out.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
    }
    return out;
  }
  // Center c with c·a = (1+|a|²)/2 and c·b = (1+|b|²)/2.
  const double ra = 0.5 * (1.0 + a[0] * a[0] + a[1] * a[1]);
  const double rb = 0.5 * (1.0 + b[0] * b[0] + b[1] * b[1]);
  const double cx = (ra * b[1] - rb * a[1]) / cross;
  const double cy = (rb * a[0] - ra * b[0]) / cross;
  const double r = std::hypot(a[0] - cx, a[1] - cy);
  const double t0 = std::atan2(a[1] - cy, a[0] - cx);
  double dt = std::atan2(b[1] - cy, b[0] - cx) - t0;
  while (dt > M_PI) dt -= 2.0 * M_PI;
  while (dt < -M_PI) dt += 2.0 * M_PI;
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + dt * static_cast<double>(i) / samples;
    out.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
  }
  out.front() = a;
  out.back() = b;
  return out;
}

/// SVG of a complex on the hyperbolic disk: unit circle, triangles as filled
/// arc-sided regions, geodesic edges, vertices. Points are in the polar chart.
inline std::string render_disk(const std::vector<Point>& points, const ComplexSample& complex) {
  std::vector<PoincarePoint> z;
  for (const auto& p : points) z.push_back(to_poincare(p));
  std::ostringstream os;
  os << detail::svg_header();
  if (complex.simplices.size() > 2) {
    const auto& tri = complex.simplices[2];
    for (std::size_t s = 0; s < tri.size(); ++s) {
      const auto t = tri[s];
      std::vector<PoincarePoint> ring;
      for (int e = 0; e < 3; ++e) {
        auto seg = geodesic_segment(z[t[e]], z[t[(e + 1) % 3]]);
        ring.insert(ring.end(), seg.begin(), seg.end() - 1);
      }
      os << "<polygon class=\"triangle\" points=\"" << detail::polyline_points(ring)
         << "\" fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
    }
  }
  if (complex.simplices.size() > 1) {
    const auto& edges = complex.simplices[1];
    for (std::size_t s = 0; s < edges.size(); ++s) {
      const auto e = edges[s];
      os << "<polyline class=\"edge\" points=\"" << detail::polyline_points(geodesic_segment(z[e[0]], z[e[1]]))
         << "\" fill=\"none\" stroke=\"#3182bd\" stroke-width=\"1\"/>\n";
    }
  }
  for (const auto& p : z) {
    const auto c = detail::to_canvas(p);
    os << "<circle class=\"vertex\" cx=\"" << detail::fmt(c[0]) << "\" cy=\"" << detail::fmt(c[1])
       << "\" r=\"2.5\" fill=\"black\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// SVG of the line process: for each point z the geodesic H(z) through z
/// perpendicular to the ray from the origin.
inline std::string render_lines(const std::vector<Point>& points) {
  std::ostringstream os;
  os << detail::svg_header();
  for (const auto& p : points) {
    const auto z = to_poincare(p);
    const double n = std::hypot(z[0], z[1]);
    std::vector<PoincarePoint> arc;
    if (n < 1e-12) {
      // H(0) is undefined; draw the diameter perpendicular to the angle instead.
      const double phi = p.location[1] + 0.5 * M_PI;
      arc = geodesic_segment({-std::cos(phi), -std::sin(phi)}, {std::cos(phi), std::sin(phi)});
    } else {
      const auto d = geometry::closest_point_geodesic(z);
      // The circle meets the unit circle where the tangent from the origin touches it.
      const double half = std::atan2(d.r, 1.0);
      const double base = std::atan2(d.cy, d.cx);
      const PoincarePoint e1{std::cos(base - half), std::sin(base - half)};
      const PoincarePoint e2{std::cos(base + half), std::sin(base + half)};
      arc = geodesic_segment(e1, e2, 2 * kArcSamples);
    }
    os << "<polyline class=\"line\" points=\"" << detail::polyline_points(arc)
       << "\" fill=\"none\" stroke=\"#636363\" stroke-width=\"1\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace rcsc
