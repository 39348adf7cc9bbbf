#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "rcsc/montecarlo.hpp"
#include "rcsc/space.hpp"

using namespace rcsc;

namespace {

Window unit_square() { return Window(EuclideanBox{{{0, 1}, {0, 1}}}); }

// Direct transcription of arccosh(1 + 2|x−y|² / ((1−|x|²)(1−|y|²))).
double arccosh_distance(const PoincarePoint& x, const PoincarePoint& y) {
  const double nx = x[0] * x[0] + x[1] * x[1];
  const double ny = y[0] * y[0] + y[1] * y[1];
  const double d2 = (x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]);
  return std::acosh(1.0 + 2.0 * d2 / ((1.0 - nx) * (1.0 - ny)));
}

}  // namespace

TEST(Measure, BoxIsProductOfSides) {
  EXPECT_DOUBLE_EQ(measure(Space{EuclideanBox{{{0, 2}, {0, 3}}}}), 6.0);
}

TEST(Measure, EmptyDiskIsZero) { EXPECT_EQ(measure(Space{HyperbolicDisk{0.0}}), 0.0); }

TEST(Measure, DiskMatchesQuadratureOfCosh) {
  for (double R : {0.5, 1.0, 2.5}) {
    const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate([](double t) { return std::cosh(t); }, 0.0, R);
    EXPECT_NEAR(measure(Space{HyperbolicDisk{R}}), q, 1e-12 * q);
  }
  EXPECT_NEAR(measure(Space{HyperbolicDisk{1.0}}), std::sinh(1.0), 1e-15);
}

TEST(Window, RejectsDegenerateInputs) {
  EXPECT_THROW(Window(HyperbolicDisk{0.0}), std::invalid_argument);
  EXPECT_THROW(Window(EuclideanBox{{{1, 1}}}), std::invalid_argument);
  EXPECT_THROW(Window(EuclideanBox{}), std::invalid_argument);
}

TEST(Window, Inradius) {
  EXPECT_DOUBLE_EQ(Window(EuclideanBox{{{0, 2}, {0, 3}}}).inradius(), 1.0);
  EXPECT_THROW(Window(HyperbolicDisk{1.0}).inradius(), std::logic_error);
}

TEST(Poisson, RejectsNonPositiveIntensity) {
  auto gen = make_generator(1, streams::kPoints);
  EXPECT_THROW(sample_poisson(unit_square(), 0.0, gen), std::invalid_argument);
  EXPECT_THROW(sample_poisson(unit_square(), -1.0, gen), std::invalid_argument);
}

TEST(Poisson, CountMeanAndVarianceOnSquare) {
  const Window w = unit_square();
  RunningStats counts;
  RunningStats squares;
  RunningStats sub;  // points in [0,0.5]x[0,0.4]
  const int reps = 20000;
  std::vector<double> xs;
  for (int i = 0; i < reps; ++i) {
    auto gen = make_generator(7, streams::kPoints, static_cast<std::uint64_t>(i));
    const auto pts = sample_poisson(w, 5.0, gen);
    const double n = static_cast<double>(pts.size());
    counts.add(n);
    squares.add((n - 5.0) * (n - 5.0));
    int inside = 0;
    for (const auto& p : pts) inside += (p.location[0] <= 0.5 && p.location[1] <= 0.4);
    sub.add(inside);
  }
  EXPECT_LT(std::abs(counts.mean() - 5.0), 4 * counts.standard_error());
  EXPECT_LT(std::abs(squares.mean() - 5.0), 4 * squares.standard_error());
  EXPECT_LT(std::abs(sub.mean() - 1.0), 4 * sub.standard_error());
}

TEST(Poisson, DiskExpectedCount) {
  const Window w(HyperbolicDisk{1.0});
  RunningStats counts;
  for (int i = 0; i < 10000; ++i) {
    auto gen = make_generator(3, streams::kPoints, static_cast<std::uint64_t>(i));
    const auto pts = sample_poisson(w, 30.0, gen);
    for (const auto& p : pts) {
      ASSERT_GE(p.location[0], 0.0);
      ASSERT_LE(p.location[0], 1.0);
    }
    counts.add(static_cast<double>(pts.size()));
  }
  EXPECT_NEAR(30.0 * std::sinh(1.0), 35.2560, 1e-3);
  EXPECT_LT(std::abs(counts.mean() - 30.0 * std::sinh(1.0)), 4 * counts.standard_error());
}

TEST(Poisson, DiskRadialLawFollowsCosh) {
  // P(t <= 0.5) = sinh(0.5)/sinh(1).
  const Window w(HyperbolicDisk{1.0});
  auto gen = make_generator(4, streams::kPoints);
  RunningStats below;
  for (int i = 0; i < 50000; ++i) below.add(w.sample_location(gen).location[0] <= 0.5);
  EXPECT_LT(std::abs(below.mean() - std::sinh(0.5) / std::sinh(1.0)), 4 * below.standard_error());
}

TEST(Poisson, TinyIntensityIsUsuallyEmpty) {
  int empty = 0;
  for (int i = 0; i < 1000; ++i) {
    auto gen = make_generator(5, streams::kPoints, static_cast<std::uint64_t>(i));
    empty += sample_poisson(unit_square(), 1e-6, gen).empty();
  }
  EXPECT_GE(empty, 999);
}

TEST(Poisson, DeterministicGivenSeed) {
  auto g1 = make_generator(11, streams::kPoints);
  auto g2 = make_generator(11, streams::kPoints);
  const auto a = sample_poisson(unit_square(), 50.0, g1);
  const auto b = sample_poisson(unit_square(), 50.0, g2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].location, b[i].location);
    EXPECT_EQ(a[i].order_key, b[i].order_key);
  }
}

TEST(Order, StrictTotalOrderWithIndexTiebreak) {
  Point a;
  Point b;
  a.order_key = b.order_key = 0.5;
  a.id = 1;
  b.id = 2;
  EXPECT_TRUE(precedes(a, b));
  EXPECT_FALSE(precedes(b, a));
  EXPECT_FALSE(precedes(a, a));
  auto gen = make_generator(12, streams::kPoints);
  auto pts = sample_poisson(unit_square(), 200.0, gen);
  auto sorted = pts;
  std::sort(sorted.begin(), sorted.end(), precedes);
  for (std::size_t i = 1; i < sorted.size(); ++i) EXPECT_TRUE(precedes(sorted[i - 1], sorted[i]));
  for (const auto& p : pts) EXPECT_EQ(p.id & kAddedPointTag, 0u);
}

TEST(HyperbolicDistance, OriginToOrigin) { EXPECT_EQ(hyperbolic_distance(PoincarePoint{0, 0}, PoincarePoint{0, 0}), 0.0); }

TEST(HyperbolicDistance, UnitDistanceAtTanhHalf) {
  const PoincarePoint y{std::tanh(0.5), 0.0};
  EXPECT_NEAR(hyperbolic_distance(PoincarePoint{0, 0}, y), 1.0, 1e-14);
  EXPECT_NEAR(arccosh_distance(PoincarePoint{0, 0}, y), 1.0, 1e-12);
}

TEST(HyperbolicDistance, RejectsPointsOnBoundary) {
  EXPECT_THROW(hyperbolic_distance(PoincarePoint{1, 0}, PoincarePoint{0, 0}), std::domain_error);
  EXPECT_THROW(hyperbolic_distance(PoincarePoint{0, 0}, PoincarePoint{0.8, 0.7}), std::domain_error);
}

TEST(HyperbolicDistance, SymmetricAndAgreesWithArccoshForm) {
  const Window w(HyperbolicDisk{3.0});
  auto gen = make_generator(13, streams::kPoints);
  for (int i = 0; i < 1000; ++i) {
    const Point a = w.sample_location(gen);
    const Point b = w.sample_location(gen);
    const double d = hyperbolic_distance(a, b);
    EXPECT_EQ(d, hyperbolic_distance(b, a));
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(d, arccosh_distance(to_poincare(a), to_poincare(b)), 1e-7 * (1 + d));
  }
}

TEST(HyperbolicDistance, RadialDistanceIsChartRadius) {
  const Point a{{2.0, 1.3}};
  const Point o{{0.0, 0.0}};
  EXPECT_NEAR(hyperbolic_distance(a, o), 2.0, 1e-12);
}

TEST(HyperbolicDistance, TriangleInequality) {
  const Window w(HyperbolicDisk{4.0});
  auto gen = make_generator(14, streams::kPoints);
  for (int i = 0; i < 1000; ++i) {
    const Point a = w.sample_location(gen);
    const Point b = w.sample_location(gen);
    const Point c = w.sample_location(gen);
    EXPECT_LE(hyperbolic_distance(a, c), hyperbolic_distance(a, b) + hyperbolic_distance(b, c) + 1e-9);
  }
}

TEST(Marks, DiscreteFrequencies) {
  const auto m = MarkDistribution::discrete({0.0, 1.0}, {1.0, 3.0});
  auto gen = make_generator(15, streams::kMarks);
  RunningStats ones;
  for (int i = 0; i < 20000; ++i) ones.add(m.sample(gen));
  EXPECT_LT(std::abs(ones.mean() - 0.75), 4 * ones.standard_error());
  EXPECT_THROW(MarkDistribution::discrete({0.0}, {}), std::invalid_argument);
  EXPECT_THROW(MarkDistribution::discrete({0.0}, {-1.0}), std::invalid_argument);
}

TEST(Marks, MarkedWindowAttachesMarks) {
  const Window w(MarkedStationary{{{0, 10}}, MarkDistribution::uniform()});
  auto gen = make_generator(16, streams::kPoints);
  const auto pts = sample_poisson(w, 5.0, gen);
  ASSERT_FALSE(pts.empty());
  bool nonzero = false;
  for (const auto& p : pts) nonzero |= p.mark != 0.0;
  EXPECT_TRUE(nonzero);
  EXPECT_EQ(w.dimension(), 1);
}
