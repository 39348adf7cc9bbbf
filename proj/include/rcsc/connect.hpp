#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcsc/geometry.hpp"
#include "rcsc/space.hpp"

namespace rcsc {

/// Largest supported complex dimension.
inline constexpr int kMaxAlpha = 6;

/// The family φ_1..φ_α of symmetric connection functions. φ_0 ≡ 1 is implied:
/// evaluating a one-point tuple returns 1.
class ConnectionSystem {
 public:
  using Function = std::function<double(std::span<const Point>)>;

  ConnectionSystem(std::string name, std::vector<Function> phi, std::optional<double> range = std::nullopt,
                   bool translation_invariant = false)
      : name_(std::move(name)), phi_(std::move(phi)), range_(range), translation_invariant_(translation_invariant) {
    if (phi_.empty()) throw std::invalid_argument("connection system needs alpha >= 1");
    if (alpha() > kMaxAlpha) throw std::invalid_argument("alpha above " + std::to_string(kMaxAlpha) + " is not supported");
    for (const auto& f : phi_)
      if (!f) throw std::invalid_argument("connection function must be callable");
  }

  int alpha() const { return static_cast<int>(phi_.size()); }
  const std::string& name() const { return name_; }

  /// φ_j for a (j+1)-tuple.
  double operator()(std::span<const Point> tuple) const {
    const std::size_t n = tuple.size();
    if (n <= 1) return 1.0;
    if (n - 1 > phi_.size()) return 0.0;
    return phi_[n - 2](tuple);
  }

  /// If set, every φ_j vanishes on tuples containing two points farther apart
  /// than this in the window's metric (hyperbolic on the disk, Euclidean on
  /// the locations otherwise).
  std::optional<double> range() const { return range_; }

  /// Whether φ_j is invariant under joint translation of the locations.
  bool translation_invariant() const { return translation_invariant_; }

 private:
  std::string name_;
  std::vector<Function> phi_;
  std::optional<double> range_;
  bool translation_invariant_;
};

namespace detail {

inline void check_alpha(int alpha) {
  if (alpha < 1 || alpha > kMaxAlpha) throw std::invalid_argument("alpha must be in 1.." + std::to_string(kMaxAlpha));
}

inline double max_pairwise(std::span<const Point> t, const Metric& metric) {
  double d = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) d = std::max(d, metric(t[i], t[j]));
  return d;
}

// Closed conditions get a relative slack so that exact boundary cases
// (two balls touching) are not lost to rounding.
inline bool within(double value, double threshold) { return value <= threshold * (1.0 + 1e-12); }

}  // namespace detail

/// φ_j ≡ p_j. With all p_j = 1 this is the clique complex of the complete graph.
inline ConnectionSystem constant_system(int alpha, std::vector<double> p) {
  detail::check_alpha(alpha);
  if (p.size() != static_cast<std::size_t>(alpha)) throw std::invalid_argument("constant system needs alpha probabilities");
  std::vector<ConnectionSystem::Function> phi;
  for (double pj : p) {
    if (!(pj >= 0.0 && pj <= 1.0)) throw std::invalid_argument("connection probability outside [0,1]");
    phi.emplace_back([pj](std::span<const Point>) { return pj; });
  }
  std::optional<double> range;
  if (p.front() == 0.0) range = 0.0;
  return ConnectionSystem("constant", std::move(phi), range, true);
}

/// Vietoris–Rips: φ_j = 1{diam(x_0..x_j) ≤ r} in the window's metric.
inline ConnectionSystem rips_system(int alpha, double r, const Window& window) {
  detail::check_alpha(alpha);
  if (!(r > 0.0)) throw std::invalid_argument("rips radius must be positive");
  const Metric metric = Metric::of(window);
  std::vector<ConnectionSystem::Function> phi;
  for (int j = 1; j <= alpha; ++j)
    phi.emplace_back([metric, r](std::span<const Point> t) { return detail::within(detail::max_pairwise(t, metric), r) ? 1.0 : 0.0; });
  return ConnectionSystem("rips", std::move(phi), r * (1.0 + 1e-12), !metric.hyperbolic);
}

/// Čech: φ_j = 1{the closed r-balls around x_0..x_j share a point}. Euclidean
/// windows use the smallest enclosing ball (radius ≤ r); the hyperbolic disk
/// maps each ball to a Euclidean disk and intersects those.
inline ConnectionSystem cech_system(int alpha, double r, const Window& window) {
  detail::check_alpha(alpha);
  if (!(r > 0.0)) throw std::invalid_argument("cech radius must be positive");
  const Metric metric = Metric::of(window);
  std::vector<ConnectionSystem::Function> phi;
  for (int j = 1; j <= alpha; ++j) {
    if (metric.hyperbolic) {
      phi.emplace_back([r](std::span<const Point> t) {
        if (t.size() == 2) return detail::within(hyperbolic_distance(t[0], t[1]), 2.0 * r) ? 1.0 : 0.0;
        std::array<geometry::Disk, kMaxAlpha + 1> disks{};
        for (std::size_t i = 0; i < t.size(); ++i) disks[i] = geometry::hyperbolic_ball(t[i].location[0], t[i].location[1], r);
        return geometry::disks_intersect(std::span<const geometry::Disk>(disks.data(), t.size())) ? 1.0 : 0.0;
      });
    } else {
      const int dim = metric.dimension;
      phi.emplace_back([r, dim](std::span<const Point> t) {
        std::array<Coordinates, kMaxAlpha + 1> xs{};
        for (std::size_t i = 0; i < t.size(); ++i) xs[i] = t[i].location;
        const auto ball = geometry::miniball(std::span<const Coordinates>(xs.data(), t.size()), dim);
        return detail::within(ball.radius_sq, r * r) ? 1.0 : 0.0;
      });
    }
  }
  return ConnectionSystem("cech", std::move(phi), 2.0 * r * (1.0 + 1e-12), !metric.hyperbolic);
}

/// The hyperbolic random geometric example: α = 2, φ_1 = 1{d_h ≤ r}, φ_2 ≡ p.
inline ConnectionSystem hyperbolic_geometric_system(double r, double p) {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
  std::vector<ConnectionSystem::Function> phi;
  phi.emplace_back([r](std::span<const Point> t) { return detail::within(hyperbolic_distance(t[0], t[1]), r) ? 1.0 : 0.0; });
  phi.emplace_back([p](std::span<const Point>) { return p; });
  return ConnectionSystem("hyperbolic_geometric", std::move(phi), r * (1.0 + 1e-12));
}

namespace detail {
inline std::atomic<long>& origin_line_count() {
  static std::atomic<long> count{0};
  return count;
}
}  // namespace detail

/// Number of times the line system was evaluated at the origin.
inline long hyperbolic_line_origin_evaluations() { return detail::origin_line_count().load(); }

/// Hyperbolic line process example: α = 2, φ_1(x,y) = 1{H(x) ∩ H(y) ≠ ∅},
/// φ_2 ≡ p. H(0) is undefined; such pairs get 0 and a one-time warning.
inline ConnectionSystem hyperbolic_line_system(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
  std::vector<ConnectionSystem::Function> phi;
  phi.emplace_back([](std::span<const Point> t) {
    if (t[0].location[0] == 0.0 || t[1].location[0] == 0.0) {
      if (detail::origin_line_count().fetch_add(1) == 0)
        std::clog << "rcsc: hyperbolic line through the origin is undefined; connection set to 0\n";
      return 0.0;
    }
    return geometry::geodesic_lines_cross(to_poincare(t[0]), to_poincare(t[1])) ? 1.0 : 0.0;
  });
  phi.emplace_back([p](std::span<const Point>) { return p; });
  return ConnectionSystem("hyperbolic_line", std::move(phi));
}

/// Translation-invariant profile for the marked stationary model:
///   φ_j = q_j · Π_{pairs} g(|x_i − x_k| / ρ(a_i, a_k)),  ρ(a,b) = radius·(1 + coupling·(a+b)/2),
/// with g the indicator of [0,1] or the Gaussian kernel exp(−s²/2). q_1 = 1.
struct StationaryProfile {
  enum class Kernel { Indicator, Gaussian };
  Kernel kernel = Kernel::Indicator;
  double radius = 0.1;
  double coupling = 0.0;
  std::vector<double> higher_order;  // q_2..q_α; missing entries default to 1
};

inline ConnectionSystem stationary_marked_system(int alpha, const StationaryProfile& profile, const Window& window) {
  detail::check_alpha(alpha);
  if (window.is_hyperbolic()) throw std::invalid_argument("stationary systems need a Euclidean or marked window");
  if (!(profile.radius > 0.0)) throw std::invalid_argument("profile radius must be positive");
  double max_mark = 0.0;
  double min_mark = 0.0;
  if (const auto* marks = window.marks()) {
    const auto grid = marks->kind() == MarkDistribution::Kind::Uniform ? std::vector<double>{0.0, 1.0} : marks->grid();
    max_mark = *std::max_element(grid.begin(), grid.end());
    min_mark = *std::min_element(grid.begin(), grid.end());
  }
  if (profile.radius * (1.0 + profile.coupling * min_mark) <= 0.0)
    throw std::invalid_argument("mark-dependent radius must stay positive");
  const int dim = window.dimension();
  const auto p = profile;
  auto pair_factor = [p, dim](const Point& a, const Point& b) {
    const double rho = p.radius * (1.0 + p.coupling * 0.5 * (a.mark + b.mark));
    const double s = euclidean_distance(a, b, dim) / rho;
    if (p.kernel == StationaryProfile::Kernel::Indicator) return detail::within(s, 1.0) ? 1.0 : 0.0;
    return std::exp(-0.5 * s * s);
  };
  std::vector<ConnectionSystem::Function> phi;
  for (int j = 1; j <= alpha; ++j) {
    double q = 1.0;
    if (j >= 2 && static_cast<std::size_t>(j - 2) < profile.higher_order.size()) q = profile.higher_order[static_cast<std::size_t>(j - 2)];
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("higher-order probability outside [0,1]");
    phi.emplace_back([pair_factor, q](std::span<const Point> t) {
      double v = q;
      for (std::size_t i = 0; i < t.size() && v > 0.0; ++i)
        for (std::size_t k = i + 1; k < t.size() && v > 0.0; ++k) v *= pair_factor(t[i], t[k]);
      return v;
    });
  }
  std::optional<double> range;
  if (profile.kernel == StationaryProfile::Kernel::Indicator)
    range = profile.radius *
            std::max(1.0 + profile.coupling * max_mark, 1.0 + profile.coupling * min_mark) * (1.0 + 1e-12);
  return ConnectionSystem(profile.kernel == StationaryProfile::Kernel::Indicator ? "stationary_indicator" : "stationary_gaussian",
                          std::move(phi), range, true);
}

}  // namespace rcsc
