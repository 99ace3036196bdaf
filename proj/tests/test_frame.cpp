#include <cmath>
#include <memory>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "shearsparse/frame.hpp"
#include "shearsparse/wavelet2d.hpp"

using namespace shearsparse;

namespace {

std::shared_ptr<const ShearletSystem> make_system(int J) {
  static const auto spec = std::make_shared<GeneratorSpec>(build_generators({"daubechies", 3, 12}));
  return std::make_shared<ShearletSystem>(spec, SystemConfig{1.0, J, 0});
}

Grid random_grid(std::size_t n, std::uint64_t seed) {
  Grid g(n);
  CounterRng rng(seed, 3);
  for (double& v : g.values()) v = rng.normal();
  return g;
}

// Dense matrix of op on grids of size n, columns = op(unit grid).
Eigen::MatrixXd assemble(const GridOperator& op, std::size_t n) {
  const Eigen::Index d = static_cast<Eigen::Index>(n * n);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Grid e(n);
    e.values()[static_cast<std::size_t>(i)] = 1.0;
    const Grid col = op(e);
    for (Eigen::Index r = 0; r < d; ++r) m(r, i) = col.values()[static_cast<std::size_t>(r)];
  }
  return m;
}

}  // namespace

TEST(FrameBounds, OrthonormalToySystemIsParseval) {
  const Wavelet2D w(3);
  const GridOperator op = [&](const Grid& g) { return w.inverse(w.forward(g)); };
  const double tol = 1e-8;
  const FrameBounds fb = estimate_frame_bounds(op, make_span(32, 32), {tol, 500, 2000, 1});
  EXPECT_NEAR(fb.lower, 1.0, tol);
  EXPECT_NEAR(fb.upper, 1.0, tol);
}

TEST(FrameBounds, DuplicationDoublesBounds) {
  const auto sys = make_system(2);
  const BlockSpan span = analyzable_span(*sys, 32);
  const double tol = 1e-8;
  const BoundsOptions bo{tol, 2000, 2000, 1};
  const FrameBounds one = estimate_frame_bounds(frame_operator(sys), span, bo);
  const GridOperator twice = [&](const Grid& g) {
    Grid s = frame_apply(g, sys);
    s *= 2.0;
    return s;
  };
  const FrameBounds two = estimate_frame_bounds(twice, span, bo);
  EXPECT_NEAR(two.upper, 2.0 * one.upper, 10 * tol * two.upper);
  EXPECT_NEAR(two.lower, 2.0 * one.lower, 10 * tol * two.lower);
}

TEST(FrameBounds, MatchDenseEigenvaluesAtTinySize) {
  const auto sys = make_system(2);
  const std::size_t n = 32;
  const BlockSpan span = analyzable_span(*sys, n);
  const GridOperator s = frame_operator(sys);
  const Eigen::MatrixXd full = assemble(s, n);
  EXPECT_LE((full - full.transpose()).cwiseAbs().maxCoeff(), 1e-12 * full.cwiseAbs().maxCoeff());
  const double B = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(full, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const Eigen::MatrixXd sub = assemble(restricted(s, span), span.m);
  const double A = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sub, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();

  const FrameBounds fb = estimate_frame_bounds(sys, n, {1e-10, 5000, 5000, 1});
  EXPECT_NEAR(fb.upper, B, 1e-4 * B);
  EXPECT_NEAR(fb.lower, A, 1e-4 * A);
}

TEST(FrameBounds, DefaultSystemAtJ4Regression) {
  const auto sys = make_system(4);
  const FrameBounds fb = estimate_frame_bounds(sys, 256, {1e-6, 500, 2000, 1});
  EXPECT_GT(fb.lower, 0.0);
  const double ratio = fb.upper / fb.lower;
  EXPECT_TRUE(std::isfinite(ratio));
  // recorded value 23.889 (A = 0.20307, B = 4.8511)
  EXPECT_NEAR(ratio, 23.889, 0.25);
}

TEST(FrameBounds, SandwichOnRandomGrids) {
  const auto sys = make_system(2);
  const std::size_t n = 32;
  const BlockSpan span = analyzable_span(*sys, n);
  const FrameBounds fb = estimate_frame_bounds(sys, n, {1e-8, 2000, 2000, 1});
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Grid g = span.extend(random_grid(span.m, 40 + s));
    const double e = norm_sq(analyze(g, sys));
    EXPECT_GE(e * 1.01, fb.lower * norm_sq(g));
    EXPECT_LE(e, 1.01 * fb.upper * norm_sq(g));
    const Grid any = random_grid(n, 90 + s);
    EXPECT_LE(norm_sq(analyze(any, sys)), 1.01 * fb.upper * norm_sq(any));
  }
}

TEST(FrameBounds, ZeroOperatorIsNotAFrame) {
  const GridOperator zero = [](const Grid& g) { return Grid(g.size()); };
  try {
    estimate_frame_bounds(zero, make_span(8, 8));
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotAFrame);
  }
  EXPECT_THROW(estimate_frame_bounds(zero, make_span(8, 8), {0.0}), Error);
}

TEST(DualReconstruct, RecoversGridsInTheSpan) {
  const auto sys = make_system(3);
  const std::size_t n = 64;
  const BlockSpan span = analyzable_span(*sys, n);
  for (double tol : {1e-6, 1e-8}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const Grid g = span.extend(random_grid(span.m, 70 + s));
      const Reconstruction r = dual_reconstruct(analyze(g, sys), n, {tol, 500, 1, nullptr});
      EXPECT_TRUE(r.report.converged);
      EXPECT_LE(norm(r.grid - g) / norm(g), 10 * tol);
      const auto& h = r.report.residual_history;
      for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]) << i;
    }
  }
}

TEST(DualReconstruct, ZeroCoefficients) {
  const auto sys = make_system(3);
  const Reconstruction r = dual_reconstruct(CoefficientSet(sys), 64);
  EXPECT_EQ(r.report.iterations, 0u);
  for (double v : r.grid.values()) EXPECT_EQ(v, 0.0);
}

TEST(DualReconstruct, BudgetExhausted) {
  const auto sys = make_system(3);
  const BlockSpan span = analyzable_span(*sys, 64);
  const CoefficientSet c = analyze(span.extend(random_grid(span.m, 5)), sys);
  const Reconstruction r = dual_reconstruct(c, 64, {1e-12, 2, 1, nullptr});
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 2u);
  try {
    dual_reconstruct_strict(c, 64, {1e-12, 2, 1, nullptr});
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MaxIterExceeded);
  }
}

TEST(BlockSpan, RestrictIsAdjointOfExtend) {
  const BlockSpan span = make_span(16, 4);
  const Grid x = random_grid(4, 1), g = random_grid(16, 2);
  EXPECT_NEAR(inner(span.extend(x), g), inner(x, span.restrict(g)), 1e-12);
  const Grid back = span.restrict(span.extend(x));
  for (std::size_t i = 0; i < x.values().size(); ++i) EXPECT_NEAR(back.values()[i], x.values()[i], 1e-14);
}
