#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "rcsc/connect.hpp"

using namespace rcsc;

namespace {

Point at(double x, double y = 0.0) {
  Point p;
  p.location = {x, y, 0, 0};
  return p;
}

Point polar(double t, double phi) {
  Point p;
  p.location = {t, phi, 0, 0};
  return p;
}

double eval(const ConnectionSystem& s, std::vector<Point> t) { return s(t); }

const Window kSquare(EuclideanBox{{{0, 1}, {0, 1}}});

// Whether the closed r-discs around the points share a point, by grid search.
bool grid_common_point(const std::vector<Point>& pts, double r, int n = 400) {
  double lo_x = 1e9, hi_x = -1e9, lo_y = 1e9, hi_y = -1e9;
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p.location[0]);
    hi_x = std::max(hi_x, p.location[0]);
    lo_y = std::min(lo_y, p.location[1]);
    hi_y = std::max(hi_y, p.location[1]);
  }
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const double x = lo_x + (hi_x - lo_x) * i / n;
      const double y = lo_y + (hi_y - lo_y) * j / n;
      bool all = true;
      for (const auto& p : pts) all &= std::hypot(x - p.location[0], y - p.location[1]) <= r;
      if (all) return true;
    }
  return false;
}

}  // namespace

TEST(Constant, ValuesAndValidation) {
  const auto s = constant_system(2, {0.3, 0.5});
  EXPECT_EQ(s.alpha(), 2);
  EXPECT_EQ(eval(s, {at(0)}), 1.0);
  EXPECT_EQ(eval(s, {at(0), at(1)}), 0.3);
  EXPECT_EQ(eval(s, {at(0), at(1), at(2)}), 0.5);
  EXPECT_EQ(eval(s, {at(0), at(1), at(2), at(3)}), 0.0);
  EXPECT_THROW(constant_system(2, {1.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(constant_system(2, {0.5}), std::invalid_argument);
  EXPECT_THROW(constant_system(0, {}), std::invalid_argument);
}

TEST(Cech, PairBoundary) {
  const auto s = cech_system(1, 0.1, kSquare);
  EXPECT_EQ(eval(s, {at(0.3), at(0.5)}), 1.0);
  EXPECT_EQ(eval(s, {at(0.3), at(0.5 + 1e-9)}), 0.0);
}

TEST(Cech, EquilateralTriangle) {
  const double r = 0.1;
  const auto s = cech_system(2, r, kSquare);
  for (double side : {0.15, 0.17, 0.1732, 0.17321, 0.175, 0.19}) {
    const double h = side * std::sqrt(3.0) / 2.0;
    std::vector<Point> t{at(0.2, 0.2), at(0.2 + side, 0.2), at(0.2 + side / 2, 0.2 + h)};
    const bool expected = side <= r * std::sqrt(3.0);
    EXPECT_EQ(eval(s, t) == 1.0, expected) << side;
    if (std::abs(side - r * std::sqrt(3.0)) > 1e-3) {
      EXPECT_EQ(grid_common_point(t, r), expected) << side;
    }
  }
}

TEST(Cech, ObtuseTriangleUsesDiameterBall) {
  // Miniball of an obtuse triangle has the long side as diameter.
  const auto s = cech_system(2, 0.1, kSquare);
  std::vector<Point> t{at(0.1, 0.5), at(0.299, 0.5), at(0.2, 0.52)};
  EXPECT_EQ(eval(s, t), 1.0);
  EXPECT_TRUE(grid_common_point(t, 0.1));
}

TEST(Cech, MatchesGridSearchOnRandomTriples) {
  const double r = 0.15;
  const auto s = cech_system(3, r, kSquare);
  auto gen = make_generator(21, streams::kPoints);
  int agree = 0;
  int total = 0;
  for (int i = 0; i < 150; ++i) {
    std::vector<Point> t;
    for (int k = 0; k < 3; ++k) t.push_back(at(0.3 + 0.3 * uniform01(gen), 0.3 + 0.3 * uniform01(gen)));
    const bool fast = eval(s, t) == 1.0;
    const bool slow = grid_common_point(t, r * (fast ? 1.0 + 1e-2 : 1.0), 200);
    ++total;
    agree += fast == slow;
  }
  EXPECT_EQ(agree, total);
}

TEST(Rips, ClosedDiameterCondition) {
  const double r = 0.2;
  const auto s = rips_system(2, r, kSquare);
  const double h = r * std::sqrt(3.0) / 2.0;
  EXPECT_EQ(eval(s, {at(0.2, 0.2), at(0.4, 0.2), at(0.3, 0.2 + h)}), 1.0);
  EXPECT_EQ(eval(s, {at(0.2, 0.2), at(0.4 + 1e-6, 0.2), at(0.3, 0.2 + h)}), 0.0);
  EXPECT_EQ(eval(s, {at(0.2), at(0.4)}), 1.0);
  EXPECT_EQ(eval(s, {at(0.2), at(0.41)}), 0.0);
}

TEST(Rips, MonotoneInRadius) {
  auto gen = make_generator(22, streams::kPoints);
  const auto small = rips_system(3, 0.2, kSquare);
  const auto large = rips_system(3, 0.3, kSquare);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Point> t;
    const int n = 2 + i % 3;
    for (int k = 0; k < n; ++k) t.push_back(at(uniform01(gen), uniform01(gen)));
    EXPECT_LE(small(t), large(t));
  }
}

TEST(Rips, HyperbolicUsesHyperbolicMetric) {
  const Window disk(HyperbolicDisk{3.0});
  const auto s = rips_system(1, 1.0, disk);
  EXPECT_NEAR(*s.range(), 1.0, 1e-9);
  EXPECT_FALSE(s.translation_invariant());
  EXPECT_EQ(eval(s, {polar(0.0, 0.0), polar(0.999, 2.0)}), 1.0);
  EXPECT_EQ(eval(s, {polar(0.0, 0.0), polar(1.001, 2.0)}), 0.0);
  EXPECT_EQ(eval(s, {polar(0.5, 0.0), polar(0.5, std::numbers::pi)}), 1.0);
}

TEST(HyperbolicGeometric, MatchesRipsPairsAndConstantTriangles) {
  const Window disk(HyperbolicDisk{3.0});
  const auto eq1 = hyperbolic_geometric_system(0.4, 0.5);
  const auto rips = rips_system(1, 0.4, disk);
  auto gen = make_generator(23, streams::kPoints);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Point> t{disk.sample_location(gen), disk.sample_location(gen)};
    EXPECT_EQ(eq1(t), rips(t));
  }
  EXPECT_EQ(eval(eq1, {polar(1, 0), polar(2, 1), polar(3, 2)}), 0.5);
}

TEST(HyperbolicCech, PairsAtTwiceRadius) {
  const Window disk(HyperbolicDisk{3.0});
  const auto s = cech_system(2, 0.5, disk);
  EXPECT_EQ(eval(s, {polar(0.0, 0.0), polar(0.999, 1.0)}), 1.0);
  EXPECT_EQ(eval(s, {polar(0.0, 0.0), polar(1.001, 1.0)}), 0.0);
  // Three points at radius t around the origin, 120 degrees apart: every
  // ball contains the origin iff t <= r.
  const double r = 0.5;
  for (double t : {0.45, 0.55}) {
    std::vector<Point> tri{polar(t, 0.0), polar(t, 2 * std::numbers::pi / 3), polar(t, 4 * std::numbers::pi / 3)};
    EXPECT_EQ(s(tri) == 1.0, t <= r) << t;
  }
}

TEST(HyperbolicLine, SameRayNeverCross) {
  const auto s = hyperbolic_line_system(0.5);
  EXPECT_EQ(eval(s, {polar(0.3, 1.0), polar(1.5, 1.0)}), 0.0);
  EXPECT_EQ(eval(s, {polar(0.01, 0.2), polar(3.0, 0.2)}), 0.0);
}

namespace {

// Oracle: geodesic endpoints on the unit circle; two geodesics cross iff their
// endpoint pairs interleave around the circle.
bool endpoints_interleave(double t1, double p1, double t2, double p2) {
  auto endpoints = [](double t, double phi) {
    const double r = std::tanh(t / 2);
    const double half = std::acos(2 * r / (1 + r * r));  // angular half-width of the arc
    return std::pair{phi - half, phi + half};
  };
  auto norm = [](double a) {
    a = std::fmod(a, 2 * std::numbers::pi);
    return a < 0 ? a + 2 * std::numbers::pi : a;
  };
  auto [a1, b1] = endpoints(t1, p1);
  auto [a2, b2] = endpoints(t2, p2);
  auto inside = [&](double x, double lo, double hi) { return norm(x - lo) < norm(hi - lo); };
  return inside(a2, a1, b1) != inside(b2, a1, b1);
}

}  // namespace

TEST(HyperbolicLine, AgreesWithEndpointInterleaving) {
  const auto s = hyperbolic_line_system(0.5);
  const Window disk(HyperbolicDisk{4.0});
  auto gen = make_generator(24, streams::kPoints);
  int crossings = 0;
  for (int i = 0; i < 2000; ++i) {
    const Point a = disk.sample_location(gen);
    const Point b = disk.sample_location(gen);
    const bool oracle = endpoints_interleave(a.location[0], a.location[1], b.location[0], b.location[1]);
    EXPECT_EQ(eval(s, {a, b}) == 1.0, oracle);
    EXPECT_EQ(eval(s, {a, b}), eval(s, {b, a}));
    crossings += oracle;
  }
  EXPECT_GT(crossings, 0);
}

TEST(HyperbolicLine, OppositeAndOrthogonalSmallRadii) {
  const auto s = hyperbolic_line_system(0.5);
  // Opposite points: H(z) and H(−z) are disjoint mirror images.
  EXPECT_EQ(eval(s, {polar(0.01, 0.0), polar(0.01, std::numbers::pi)}), 0.0);
  // Near-diametral lines at right angles cross near the origin.
  EXPECT_EQ(eval(s, {polar(0.01, 0.0), polar(0.01, std::numbers::pi / 2)}), 1.0);
}

TEST(HyperbolicLine, OriginGivesZeroAndIsCounted) {
  const auto s = hyperbolic_line_system(0.5);
  const long before = hyperbolic_line_origin_evaluations();
  EXPECT_EQ(eval(s, {polar(0.0, 0.0), polar(1.0, 0.0)}), 0.0);
  EXPECT_EQ(hyperbolic_line_origin_evaluations(), before + 1);
}

TEST(Stationary, TranslationInvariant) {
  const Window w(MarkedStationary{{{0, 10}, {0, 10}}, MarkDistribution::uniform()});
  StationaryProfile prof;
  prof.radius = 1.0;
  prof.coupling = 0.5;
  prof.higher_order = {0.7};
  const auto s = stationary_marked_system(2, prof, w);
  StationaryProfile gprof = prof;
  gprof.kernel = StationaryProfile::Kernel::Gaussian;
  const auto g = stationary_marked_system(2, gprof, w);
  auto gen = make_generator(25, streams::kPoints);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Point> t;
    for (int k = 0; k < 3; ++k) t.push_back(w.sample_location(gen));
    t.resize(2 + i % 2);
    auto shifted = t;
    const double dx = uniform(gen, -50, 50);
    const double dy = uniform(gen, -50, 50);
    for (auto& p : shifted) {
      p.location[0] += dx;
      p.location[1] += dy;
    }
    EXPECT_EQ(s(t), s(shifted)) << i;
    EXPECT_NEAR(g(t), g(shifted), 1e-12);
  }
}

TEST(Stationary, SingleMarkReducesToUnmarked) {
  const Window marked(MarkedStationary{{{0, 10}}, MarkDistribution::single()});
  const Window plain(EuclideanBox{{{0, 10}}});
  StationaryProfile prof;
  prof.radius = 0.3;
  prof.coupling = 2.0;
  const auto a = stationary_marked_system(2, prof, marked);
  const auto b = stationary_marked_system(2, prof, plain);
  auto gen = make_generator(26, streams::kPoints);
  for (int i = 0; i < 500; ++i) {
    std::vector<Point> t{marked.sample_location(gen), marked.sample_location(gen)};
    t[0].location[0] = t[1].location[0] + uniform(gen, -0.5, 0.5);
    EXPECT_EQ(a(t), b(t));
    EXPECT_EQ(a(t), std::abs(t[0].location[0] - t[1].location[0]) <= 0.3 ? 1.0 : 0.0);
  }
}

TEST(Properties, SymmetricAndInRange) {
  const Window disk(HyperbolicDisk{3.0});
  const Window marked(MarkedStationary{{{0, 1}, {0, 1}}, MarkDistribution::discrete({0.0, 1.0}, {1, 1})});
  StationaryProfile prof;
  prof.radius = 0.4;
  prof.coupling = 1.0;
  prof.kernel = StationaryProfile::Kernel::Gaussian;
  struct Case {
    ConnectionSystem system;
    const Window* window;
  };
  std::vector<Case> cases{
      {constant_system(3, {0.3, 0.5, 0.7}), &kSquare},
      {rips_system(3, 0.5, kSquare), &kSquare},
      {cech_system(3, 0.3, kSquare), &kSquare},
      {rips_system(3, 1.5, disk), &disk},
      {cech_system(3, 1.0, disk), &disk},
      {hyperbolic_geometric_system(1.0, 0.5), &disk},
      {hyperbolic_line_system(0.5), &disk},
      {stationary_marked_system(3, prof, marked), &marked},
  };
  auto gen = make_generator(27, streams::kPoints);
  for (const auto& c : cases) {
    for (int i = 0; i < 1000; ++i) {
      const int n = 2 + i % c.system.alpha();
      std::vector<Point> t;
      for (int k = 0; k < n; ++k) t.push_back(c.window->sample_location(gen));
      const double v = c.system(t);
      // Exact for indicators and constants; the Gaussian product may differ in the last bit.
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      auto perm = t;
      std::shuffle(perm.begin(), perm.end(), gen);
      EXPECT_NEAR(v, c.system(perm), 1e-14) << c.system.name();
    }
  }
}
