#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "shearsparse/cartoon.hpp"

using namespace shearsparse;

namespace {

RadiusProfile disk() { return make_radius_profile({}, 0.25, {0.5, 0.5}, 1.0); }

CartoonImage indicator(const RadiusProfile& b) { return {SmoothPatch::zero(), SmoothPatch::constant(1.0), b, true}; }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

// Area of the rectangle [x0,x1] x [y0,y1] inside the circle, by composite
// Simpson on the chord-length function with a fine fixed step.
double circle_rect_area(double cx, double cy, double r, double x0, double x1, double y0, double y1) {
  auto chord = [&](double x) {
    const double d = r * r - (x - cx) * (x - cx);
    if (d <= 0) return 0.0;
    const double h = std::sqrt(d);
    return std::max(0.0, std::min(y1, cy + h) - std::max(y0, cy - h));
  };
  const int steps = 400000;
  const double h = (x1 - x0) / steps;
  double s = chord(x0) + chord(x1);
  for (int i = 1; i < steps; ++i) s += chord(x0 + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST(RadiusProfile, DiskIsAccepted) {
  const RadiusProfile p = disk();
  EXPECT_DOUBLE_EQ(p.rho(1.234), 0.25);
  EXPECT_EQ(p.sampled_curvature_bound(), 0.0);
}

TEST(RadiusProfile, CurvatureExceeded) {
  // rho = 0.25 + 0.3 cos(2 theta): sup |rho''| = 1.2 > 1
  EXPECT_EQ(kind_of([] { make_radius_profile({{0, 0}, {0.3, 0}}, 0.25, {0.5, 0.5}, 1.0); }),
            ErrorKind::CurvatureExceeded);
}

TEST(RadiusProfile, OutOfUnitSquare) {
  EXPECT_EQ(kind_of([] { make_radius_profile({}, 0.6, {0.9, 0.9}, 1.0); }), ErrorKind::OutOfUnitSquare);
}

TEST(RadiusProfile, RadiusAboveRho0Rejected) {
  EXPECT_EQ(kind_of([] { make_radius_profile({}, 0.3, {0.5, 0.5}, 1.0, 0.2); }), ErrorKind::InvalidArgument);
}

TEST(RadiusProfile, SampledCurvatureMatchesClosedForm) {
  for (int m : {1, 2, 3, 5, 7}) {
    const double a = 0.01;
    std::vector<RadiusProfile::Harmonic> h(static_cast<std::size_t>(m));
    h.back() = {a, 0.0};
    const RadiusProfile p = make_radius_profile(h, 0.25, {0.5, 0.5}, 10.0);
    EXPECT_NEAR(p.sampled_curvature_bound(), a * m * m, 1e-6 * a * m * m) << "m = " << m;
  }
}

TEST(BoundaryPoint, Examples) {
  const RadiusProfile p = disk();
  Point x = boundary_point(p, 0.0);
  EXPECT_NEAR(x.x1, 0.75, 1e-15);
  EXPECT_NEAR(x.x2, 0.5, 1e-15);
  x = boundary_point(p, std::numbers::pi / 2);
  EXPECT_NEAR(x.x1, 0.5, 1e-15);
  EXPECT_NEAR(x.x2, 0.75, 1e-15);
  const RadiusProfile q = make_radius_profile({{0, 0}, {0.01, 0}}, 0.25, {0.5, 0.5}, 1.0);
  x = boundary_point(q, 0.0);
  EXPECT_NEAR(x.x1, 0.76, 1e-15);
  EXPECT_NEAR(x.x2, 0.5, 1e-15);
}

TEST(Contains, Examples) {
  const RadiusProfile p = disk();
  EXPECT_TRUE(contains(p, {0.5, 0.5}));
  EXPECT_FALSE(contains(p, {0.9, 0.9}));
  EXPECT_TRUE(contains(p, {0.75, 0.5}));
}

TEST(Contains, ConsistentWithBoundaryPoint) {
  const RadiusProfile p = make_radius_profile({{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0.08, 0.02}}, 0.25, {0.5, 0.5}, 10.0);
  for (std::size_t i = 0; i < kThetaSamples; ++i) {
    const double t = RadiusProfile::sample_theta(i);
    const Point x = boundary_point(p, t);
    ASSERT_TRUE(contains(p, x)) << t;
    const Point pushed = p.translate() + (1.0 + 1e-6) * (x - p.translate());
    ASSERT_FALSE(contains(p, pushed)) << t;
  }
}

TEST(TangentSlope, DiskExamples) {
  const RadiusProfile p = disk();
  EXPECT_NEAR(tangent_slope(p, 0.0), 0.0, 1e-15);
  EXPECT_TRUE(std::isinf(tangent_slope(p, std::numbers::pi / 2)));
  EXPECT_NEAR(tangent_slope(p, std::numbers::pi / 4), -1.0, 1e-12);
}

TEST(TangentSlope, MatchesFiniteDifference) {
  const RadiusProfile p = make_radius_profile({{0, 0}, {0.03, 0.01}, {0, 0}, {0, 0}, {0.05, 0}}, 0.3, {0.5, 0.5}, 10.0);
  const double h = 1e-6;
  for (int i = 0; i < 64; ++i) {
    const double t = 0.05 + i * 0.097;
    const double s = tangent_slope(p, t);
    if (std::isinf(s) || std::abs(s) > 1e3) continue;
    const Point a = boundary_point(p, t - h), b = boundary_point(p, t + h);
    const double fd = (b.x1 - a.x1) / (b.x2 - a.x2);
    EXPECT_NEAR(s, fd, 1e-6 * std::max(1.0, std::abs(s))) << t;
  }
}

TEST(SmoothPatch, C2NormExceeded) {
  EXPECT_EQ(kind_of([] { SmoothPatch::polynomial({0.2, 0.0, 0.0, 0.6}); }), ErrorKind::C2NormExceeded);
  EXPECT_NO_THROW(SmoothPatch::polynomial({0.2, 0.1, 0.0, 0.1}));
}

TEST(SmoothPatch, BumpJetMatchesFiniteDifferences) {
  const SmoothPatch b = SmoothPatch::bump_sum({{0.002, {0.45, 0.5}, 0.45}});
  const double h = 1e-5;
  const Point x{0.5, 0.55};
  const Jet j = b.jet(x);
  EXPECT_NEAR(j.d1, (b({x.x1 + h, x.x2}) - b({x.x1 - h, x.x2})) / (2 * h), 1e-8);
  EXPECT_NEAR(j.d2, (b({x.x1, x.x2 + h}) - b({x.x1, x.x2 - h})) / (2 * h), 1e-8);
  const double d11 = (b.jet({x.x1 + h, x.x2}).d1 - b.jet({x.x1 - h, x.x2}).d1) / (2 * h);
  const double d12 = (b.jet({x.x1, x.x2 + h}).d1 - b.jet({x.x1, x.x2 - h}).d1) / (2 * h);
  EXPECT_NEAR(j.d11, d11, 1e-7);
  EXPECT_NEAR(j.d12, d12, 1e-7);
}

TEST(Evaluate, IndicatorInsideOutside) {
  const CartoonImage f = indicator(disk());
  EXPECT_EQ(evaluate(f, {0.5, 0.5}), 1.0);
  EXPECT_EQ(evaluate(f, {0.9, 0.1}), 0.0);
}

TEST(Evaluate, SmoothBumpAtCenter) {
  // w e exp(-1/(1-0)) = w at the center
  const CartoonImage f{SmoothPatch::bump_sum({{0.5, {0.5, 0.5}, 5.0}}), SmoothPatch::zero(), disk(), false};
  EXPECT_NEAR(evaluate(f, {0.5, 0.5}), 0.5, 1e-15);
}

TEST(Rasterize, ZeroAndConstant) {
  const CartoonImage zero{SmoothPatch::zero(), SmoothPatch::zero(), disk(), true};
  for (double v : rasterize(zero, 16, 4).values()) EXPECT_EQ(v, 0.0);
  const CartoonImage konst{SmoothPatch::constant(0.7), SmoothPatch::zero(), disk(), false};
  for (double v : rasterize(konst, 16, 4).values()) EXPECT_NEAR(v, 0.7, 1e-15);
}

TEST(Rasterize, StraddlingPixelsMatchCircleArea) {
  const std::size_t n = 4, os = 32;
  const Grid g = rasterize(indicator(disk()), n, os);
  int straddling = 0;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t a = 0; a < n; ++a) {
      const double x0 = a / 4.0, y0 = b / 4.0;
      const double area = circle_rect_area(0.5, 0.5, 0.25, x0, x0 + 0.25, y0, y0 + 0.25) * 16.0;
      EXPECT_NEAR(g(b, a), area, 1.0 / os) << a << "," << b;
      if (area > 0 && area < 1) ++straddling;
    }
  EXPECT_GT(straddling, 0);
}

TEST(Rasterize, Linear) {
  const CartoonImage f = indicator(disk());
  const CartoonImage g{SmoothPatch::polynomial({0.1, 0.2, -0.1}), SmoothPatch::zero(), disk(), false};
  const double alpha = 0.3, beta = -1.7;
  const Grid lhs = rasterize([&](Point x) { return alpha * f(x) + beta * g(x); }, 32, 4);
  const Grid rf = rasterize(f, 32, 4), rg = rasterize(g, 32, 4);
  for (std::size_t i = 0; i < lhs.values().size(); ++i)
    EXPECT_NEAR(lhs.values()[i], alpha * rf.values()[i] + beta * rg.values()[i], 1e-12);
}

TEST(Rasterize, WorkerCountDoesNotChangePixels) {
  const CartoonImage f = indicator(make_radius_profile({{0, 0}, {0.04, 0}}, 0.3, {0.5, 0.5}, 1.0));
  EXPECT_TRUE(rasterize(f, 64, 4, 1) == rasterize(f, 64, 4, 3));
}
