#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "rcsc/rng.hpp"

namespace rcsc {

inline constexpr int kMaxDimension = 4;
using Coordinates = std::array<double, kMaxDimension>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// Distribution of the mark attached to each vertex in the marked stationary
/// setting. Marks are real numbers; a single-point mark space always yields 0.
class MarkDistribution {
 public:
  enum class Kind { Single, Discrete, Uniform };

  MarkDistribution() = default;

  static MarkDistribution single() { return {}; }

  static MarkDistribution uniform() {
    MarkDistribution m;
    m.kind_ = Kind::Uniform;
    return m;
  }

  static MarkDistribution discrete(std::vector<double> values, std::vector<double> weights) {
    if (values.empty() || values.size() != weights.size())
      throw std::invalid_argument("discrete marks: values and weights must be non-empty and of equal length");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("discrete marks: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("discrete marks: weights sum to zero");
    MarkDistribution m;
    m.kind_ = Kind::Discrete;
    m.values_ = std::move(values);
    m.cumulative_.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i] / total;
      m.cumulative_[i] = acc;
    }
    m.cumulative_.back() = 1.0;
    return m;
  }

  Kind kind() const { return kind_; }
  const std::vector<double>& values() const { return values_; }

  double sample(Generator& gen) const {
    switch (kind_) {
      case Kind::Single:
        return 0.0;
      case Kind::Uniform:
        return uniform01(gen);
      case Kind::Discrete: {
        const double u = uniform01(gen);
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                               values_.size() - 1);
        return values_[idx];
      }
    }
    return 0.0;
  }

  /// Representative marks used when a supremum over the mark space is needed.
  std::vector<double> grid(int uniform_points = 11) const {
    switch (kind_) {
      case Kind::Single:
        return {0.0};
      case Kind::Discrete:
        return values_;
      case Kind::Uniform: {
        std::vector<double> g(static_cast<std::size_t>(uniform_points));
        for (int i = 0; i < uniform_points; ++i) g[static_cast<std::size_t>(i)] = (i + 0.5) / uniform_points;
        return g;
      }
    }
    return {0.0};
  }

 private:
  Kind kind_ = Kind::Single;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

/// Radial density of the intensity on the hyperbolic disk, w.r.t. dt dφ/(2π).
/// `Cosh` is the density used for the published hyperbolic examples; `Sinh` is
/// the hyperbolic area element.
enum class RadialDensity { Cosh, Sinh };

struct EuclideanBox {
  std::vector<Interval> bounds;
};

struct HyperbolicDisk {
  double radius = 1.0;
  RadialDensity density = RadialDensity::Cosh;
};

struct MarkedStationary {
  std::vector<Interval> bounds;
  MarkDistribution marks;
};

using Space = std::variant<EuclideanBox, HyperbolicDisk, MarkedStationary>;

/// A vertex. For the hyperbolic disk `location` holds the polar chart
/// (t, φ): hyperbolic distance to the origin and angle.
struct Point {
  Coordinates location{};
  double mark = 0.0;
  double order_key = 0.0;
  std::uint64_t id = 0;
};

/// Strict total order realizing ≺: order key first, identity as tiebreak.
inline bool precedes(const Point& a, const Point& b) {
  if (a.order_key != b.order_key) return a.order_key < b.order_key;
  return a.id < b.id;
}

/// Identity derived from the bit pattern of an order key in [0,1). The top bit
/// is always clear, which leaves the upper half of the id space for added
/// points.
inline std::uint64_t identity_from_order_key(double key) { return std::bit_cast<std::uint64_t>(key); }

inline constexpr std::uint64_t kAddedPointTag = 1ULL << 63;

namespace detail {

inline double box_measure(const std::vector<Interval>& bounds) {
  double v = 1.0;
  for (const auto& iv : bounds) v *= iv.length();
  return v;
}

inline void validate_box(const std::vector<Interval>& bounds) {
  if (bounds.empty() || bounds.size() > static_cast<std::size_t>(kMaxDimension))
    throw std::invalid_argument("box dimension must be in 1.." + std::to_string(kMaxDimension));
  for (const auto& iv : bounds)
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.hi > iv.lo))
      throw std::invalid_argument("box side must satisfy lo < hi");
}

}  // namespace detail

/// Closed-form |W|. For the hyperbolic disk of radius R this is
/// (1/2π)∫∫ density(t) dt dφ, i.e. sinh(R) for the cosh density.
inline double measure(const Space& space) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HyperbolicDisk>) {
          if (!(s.radius > 0.0)) return 0.0;
          return s.density == RadialDensity::Cosh ? std::sinh(s.radius) : std::cosh(s.radius) - 1.0;
        } else {
          return detail::box_measure(s.bounds);
        }
      },
      space);
}

/// Observation window: a space together with its (positive, finite) measure.
class Window {
 public:
  explicit Window(Space space) : space_(std::move(space)) {
    std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HyperbolicDisk>) {
            if (!std::isfinite(s.radius) || !(s.radius > 0.0))
              throw std::invalid_argument("hyperbolic window radius must be positive");
          } else {
            detail::validate_box(s.bounds);
          }
        },
        space_);
    measure_ = rcsc::measure(space_);
    if (!(measure_ > 0.0) || !std::isfinite(measure_)) throw std::invalid_argument("window has degenerate measure");
  }

  const Space& space() const { return space_; }
  double measure() const { return measure_; }

  bool is_hyperbolic() const { return std::holds_alternative<HyperbolicDisk>(space_); }
  bool is_marked() const { return std::holds_alternative<MarkedStationary>(space_); }

  int dimension() const {
    if (is_hyperbolic()) return 2;
    if (const auto* b = std::get_if<EuclideanBox>(&space_)) return static_cast<int>(b->bounds.size());
    return static_cast<int>(std::get<MarkedStationary>(space_).bounds.size());
  }

  const std::vector<Interval>& bounds() const {
    if (const auto* b = std::get_if<EuclideanBox>(&space_)) return b->bounds;
    if (const auto* m = std::get_if<MarkedStationary>(&space_)) return m->bounds;
    throw std::logic_error("hyperbolic window has no box bounds");
  }

  /// Inradius; half the shortest side for boxes. Not defined for the disk.
  double inradius() const {
    if (is_hyperbolic()) throw std::logic_error("inradius is defined for Euclidean boxes only");
    double side = bounds().front().length();
    for (const auto& iv : bounds()) side = std::min(side, iv.length());
    return 0.5 * side;
  }

  const MarkDistribution* marks() const {
    if (const auto* m = std::get_if<MarkedStationary>(&space_)) return &m->marks;
    return nullptr;
  }

  bool contains(const Coordinates& x) const {
    if (const auto* h = std::get_if<HyperbolicDisk>(&space_)) return x[0] >= 0.0 && x[0] <= h->radius;
    const auto& b = bounds();
    for (std::size_t i = 0; i < b.size(); ++i)
      if (x[i] < b[i].lo || x[i] > b[i].hi) return false;
    return true;
  }

  /// Location drawn from λ_W/|W| (plus an independent mark when marked).
  /// Order key and identity are left unset.
  Point sample_location(Generator& gen) const {
    Point p;
    if (const auto* h = std::get_if<HyperbolicDisk>(&space_)) {
      const double u = uniform01(gen);
      p.location[0] = h->density == RadialDensity::Cosh
                          ? std::asinh(u * std::sinh(h->radius))
                          : std::acosh(1.0 + u * (std::cosh(h->radius) - 1.0));
      p.location[1] = 2.0 * M_PI * uniform01(gen);
      return p;
    }
    const auto& b = bounds();
    for (std::size_t i = 0; i < b.size(); ++i) p.location[i] = uniform(gen, b[i].lo, b[i].hi);
    if (const auto* m = marks()) p.mark = m->sample(gen);
    return p;
  }

  /// Location as above plus a fresh order key and the matching identity.
  Point sample_point(Generator& gen) const {
    Point p = sample_location(gen);
    p.order_key = uniform01(gen);
    p.id = identity_from_order_key(p.order_key);
    return p;
  }

 private:
  Space space_;
  double measure_ = 0.0;
};

inline double measure(const Window& window) { return window.measure(); }

/// Poisson process on the window with intensity β λ_W, via the mixed binomial
/// representation: N ~ Poisson(β|W|), then N i.i.d. points from λ_W/|W|.
inline std::vector<Point> sample_poisson(const Window& window, double beta, Generator& gen) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("intensity beta must be positive");
  std::poisson_distribution<long long> count_dist(beta * window.measure());
  const long long n = count_dist(gen);
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) points.push_back(window.sample_point(gen));
  return points;
}

// ---------------------------------------------------------------------------
// Hyperbolic plane, Poincaré disk model.

using PoincarePoint = std::array<double, 2>;

inline PoincarePoint to_poincare(double t, double phi) {
  const double r = std::tanh(0.5 * t);
  return {r * std::cos(phi), r * std::sin(phi)};
}

inline PoincarePoint to_poincare(const Point& p) { return to_poincare(p.location[0], p.location[1]); }

/// Hyperbolic distance between two points of the open unit disk,
/// arccosh(1 + 2|x−y|² / ((1−|x|²)(1−|y|²))). Evaluated through the equivalent
/// 2·asinh(|x−y| / sqrt((1−|x|²)(1−|y|²))), which keeps precision for nearby points.
inline double hyperbolic_distance(const PoincarePoint& x, const PoincarePoint& y) {
  const double nx = x[0] * x[0] + x[1] * x[1];
  const double ny = y[0] * y[0] + y[1] * y[1];
  if (!(nx < 1.0) || !(ny < 1.0)) throw std::domain_error("point outside the open unit disk");
  const double dx = x[0] - y[0];
  const double dy = x[1] - y[1];
  const double u = std::sqrt(dx * dx + dy * dy) / std::sqrt((1.0 - nx) * (1.0 - ny));
  return 2.0 * std::asinh(u);
}

/// Distance between two disk points given in the polar chart.
inline double hyperbolic_distance(const Point& a, const Point& b) {
  return hyperbolic_distance(to_poincare(a), to_poincare(b));
}

inline double euclidean_distance(const Point& a, const Point& b, int dimension) {
  double s = 0.0;
  for (int i = 0; i < dimension; ++i) {
    const double d = a.location[static_cast<std::size_t>(i)] - b.location[static_cast<std::size_t>(i)];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Metric of the space a window lives in.
struct Metric {
  bool hyperbolic = false;
  int dimension = 2;

  static Metric of(const Window& w) { return Metric{w.is_hyperbolic(), w.dimension()}; }

  double operator()(const Point& a, const Point& b) const {
    return hyperbolic ? hyperbolic_distance(a, b) : euclidean_distance(a, b, dimension);
  }
};

}  // namespace rcsc
