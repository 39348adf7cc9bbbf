#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "rcsc/space.hpp"

namespace rcsc::geometry {

struct Ball {
  Coordinates center{};
  double radius_sq = -1.0;  // negative: empty ball

  bool contains(const Coordinates& p, int dimension) const {
    if (radius_sq < 0.0) return false;
    double s = 0.0;
    for (int i = 0; i < dimension; ++i) {
      const double d = p[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)];
      s += d * d;
    }
    return s <= radius_sq * (1.0 + 1e-12) + 1e-300;
  }
};

/// Ball whose boundary passes through all support points, centered in their
/// affine hull. Affinely dependent supports give an empty ball.
inline Ball circumball(std::span<const Coordinates> support, int dimension) {
  Ball b;
  const std::size_t k = support.size();
  if (k == 0) return b;
  const Coordinates& p0 = support[0];
  if (k == 1) {
    b.center = p0;
    b.radius_sq = 0.0;
    return b;
  }
  // Solve sum_j (2 v_i.v_j) lambda_j = |v_i|^2 with v_i = p_i - p0.
  constexpr std::size_t kMax = kMaxDimension + 1;
  std::array<Coordinates, kMax> v{};
  const std::size_t m = k - 1;
  for (std::size_t i = 0; i < m; ++i)
    for (int c = 0; c < dimension; ++c)
      v[i][static_cast<std::size_t>(c)] = support[i + 1][static_cast<std::size_t>(c)] - p0[static_cast<std::size_t>(c)];
  auto dot = [dimension](const Coordinates& a, const Coordinates& c) {
    double s = 0.0;
    for (int i = 0; i < dimension; ++i) s += a[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
    return s;
  };
  std::array<std::array<double, kMax + 1>, kMax> a{};
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) a[i][j] = 2.0 * dot(v[i], v[j]);
    a[i][m] = dot(v[i], v[i]);
    scale = std::max(scale, a[i][m]);
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= 1e-14 * std::max(scale, 1e-300)) return Ball{};
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  b.center = p0;
  for (std::size_t j = 0; j < m; ++j) {
    const double lambda = a[j][m] / a[j][j];
    for (int c = 0; c < dimension; ++c) b.center[static_cast<std::size_t>(c)] += lambda * v[j][static_cast<std::size_t>(c)];
  }
  double r2 = 0.0;
  for (int c = 0; c < dimension; ++c) {
    const double d = p0[static_cast<std::size_t>(c)] - b.center[static_cast<std::size_t>(c)];
    r2 += d * d;
  }
  b.radius_sq = r2;
  return b;
}

namespace detail {

inline Ball welzl(std::span<const Coordinates> points, std::size_t n, std::array<Coordinates, kMaxDimension + 1>& support,
                  std::size_t support_size, int dimension) {
  if (n == 0 || support_size == static_cast<std::size_t>(dimension) + 1)
    return circumball(std::span<const Coordinates>(support.data(), support_size), dimension);
  const Coordinates& p = points[n - 1];
  Ball b = welzl(points, n - 1, support, support_size, dimension);
  if (b.contains(p, dimension)) return b;
  support[support_size] = p;
  return welzl(points, n - 1, support, support_size + 1, dimension);
}

}  // namespace detail

/// Smallest enclosing ball of a handful of points (Welzl's recursion).
inline Ball miniball(std::span<const Coordinates> points, int dimension) {
  std::array<Coordinates, kMaxDimension + 1> support{};
  return detail::welzl(points, points.size(), support, 0, dimension);
}

// ---------------------------------------------------------------------------
// Poincaré disk helpers. Hyperbolic circles and geodesics are Euclidean
// circles (or diameters) in this model.

struct Disk {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;

  bool contains(double x, double y, double tol = 1e-12) const {
    const double dx = x - cx;
    const double dy = y - cy;
    return std::sqrt(dx * dx + dy * dy) <= r + tol;
  }
};

/// Euclidean disk equal to the closed hyperbolic ball of radius `radius`
/// around the chart point (t, φ).
inline Disk hyperbolic_ball(double t, double phi, double radius) {
  const double far = std::tanh(0.5 * (t + radius));
  const double near = std::tanh(0.5 * (t - radius));  // negative when the ball contains the origin
  const double c = 0.5 * (far + near);
  return {c * std::cos(phi), c * std::sin(phi), 0.5 * (far - near)};
}

/// Whether a family of closed disks has a common point. The leftmost point of
/// a nonempty intersection is either the leftmost point of one disk or a
/// crossing of two boundary circles, so those candidates suffice.
inline bool disks_intersect(std::span<const Disk> disks, double tol = 1e-12) {
  auto in_all = [&](double x, double y) {
    for (const auto& d : disks)
      if (!d.contains(x, y, tol)) return false;
    return true;
  };
  for (const auto& d : disks)
    if (in_all(d.cx - d.r, d.cy)) return true;
  for (std::size_t i = 0; i < disks.size(); ++i) {
    for (std::size_t j = i + 1; j < disks.size(); ++j) {
      const Disk& a = disks[i];
      const Disk& b = disks[j];
      const double dx = b.cx - a.cx;
      const double dy = b.cy - a.cy;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (dist == 0.0 || dist > a.r + b.r + tol || dist < std::abs(a.r - b.r) - tol) continue;
      const double along = (a.r * a.r - b.r * b.r + dist * dist) / (2.0 * dist);
      const double h = std::sqrt(std::max(0.0, a.r * a.r - along * along));
      const double mx = a.cx + along * dx / dist;
      const double my = a.cy + along * dy / dist;
      if (in_all(mx + h * dy / dist, my - h * dx / dist)) return true;
      if (in_all(mx - h * dy / dist, my + h * dx / dist)) return true;
    }
  }
  return false;
}

/// The geodesic H(z) whose closest point to the origin is z, as a circle
/// orthogonal to the unit circle: center at distance (1+|z|²)/(2|z|) along z,
/// radius (1−|z|²)/(2|z|). Undefined for z = 0.
inline Disk closest_point_geodesic(const PoincarePoint& z) {
  const double n = std::hypot(z[0], z[1]);
  const double c = (1.0 + n * n) / (2.0 * n);
  return {c * z[0] / n, c * z[1] / n, (1.0 - n * n) / (2.0 * n)};
}

/// Whether H(x) and H(y) meet inside the disk. Two circles orthogonal to the
/// unit circle that cross do so at a point and its inverse, exactly one of
/// which is inside, so a strict circle-crossing test decides the question.
/// Returns false when either point is the origin.
inline bool geodesic_lines_cross(const PoincarePoint& x, const PoincarePoint& y, double tol = 1e-12) {
  if (std::hypot(x[0], x[1]) == 0.0 || std::hypot(y[0], y[1]) == 0.0) return false;
  const Disk a = closest_point_geodesic(x);
  const Disk b = closest_point_geodesic(y);
  const double dist = std::hypot(a.cx - b.cx, a.cy - b.cy);
  return dist < a.r + b.r - tol && dist > std::abs(a.r - b.r) + tol;
}

}  // namespace rcsc::geometry
