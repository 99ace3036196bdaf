#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "shearsparse/error.hpp"
#include "shearsparse/grid.hpp"
#include "shearsparse/random.hpp"
#include "shearsparse/transform.hpp"

namespace shearsparse {

// Self-adjoint positive semidefinite operator on grids of one size.
using GridOperator = std::function<Grid(const Grid&)>;

// Grids on the n-grid that are constant on m x m blocks of pixels. extend()
// replicates an m-grid, restrict() averages blocks; restrict is the adjoint of
// extend and restrict(extend(x)) = x, both in the L2 grid inner products.
struct BlockSpan {
  std::size_t n = 0;
  std::size_t m = 0;

  std::size_t factor() const { return n / m; }

  Grid extend(const Grid& x) const {
    if (x.size() != m) fail(ErrorKind::InvalidArgument, "span: coarse grid size mismatch");
    if (m == n) return x;
    const std::size_t r = factor();
    Grid g(n);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t a = 0; a < n; ++a) g(b, a) = x(b / r, a / r);
    return g;
  }

  Grid restrict(const Grid& g) const {
    if (g.size() != n) fail(ErrorKind::InvalidArgument, "span: fine grid size mismatch");
    if (m == n) return g;
    const std::size_t r = factor();
    Grid x(m);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t a = 0; a < n; ++a) x(b / r, a / r) += g(b, a);
    x *= 1.0 / static_cast<double>(r * r);
    return x;
  }

  // Orthogonal projection onto the span.
  Grid project(const Grid& g) const { return extend(restrict(g)); }
};

inline BlockSpan make_span(std::size_t n, std::size_t m) {
  if (!is_power_of_two(n) || !is_power_of_two(m) || m > n)
    fail(ErrorKind::InvalidArgument, "span resolution must be a power of two not exceeding the grid size");
  return {n, m};
}

// The analyzable span of a system on the n-grid: grids constant on squares of
// side 2^-J, the footprint width of the finest atoms in their short direction.
inline BlockSpan analyzable_span(const ShearletSystem& system, std::size_t n) {
  return make_span(n, std::min(n, std::size_t{1} << system.J()));
}

// x -> restrict(S extend(x)) on the coarse grid.
inline GridOperator restricted(GridOperator op, BlockSpan span) {
  if (span.m == span.n) return op;
  return [op = std::move(op), span](const Grid& x) { return span.restrict(op(span.extend(x))); };
}

struct SolveReport {
  std::size_t iterations = 0;
  double residual = 0;  // final ||S x - b|| / ||b||
  bool converged = false;
  std::vector<double> residual_history;  // relative residual at start and after each iteration
};

// Conjugate residual iteration for S x = b, S self-adjoint in the grid inner
// product. Each step minimizes ||b - S x|| over a growing Krylov space, so the
// recorded residuals never increase.
inline SolveReport conjugate_residual(const GridOperator& op, const Grid& b, Grid& x, double tol,
                                      std::size_t max_iter) {
  SolveReport rep;
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    x = Grid(b.size());
    rep.converged = true;
    rep.residual_history.push_back(0.0);
    return rep;
  }
  if (x.size() != b.size()) x = Grid(b.size());

  Grid r = b - op(x);
  double res = norm(r) / bnorm;
  rep.residual_history.push_back(res);
  if (res <= tol) {
    rep.residual = res;
    rep.converged = true;
    return rep;
  }
  Grid p = r;
  Grid ar = op(r);
  Grid ap = ar;
  double rar = inner(r, ar);
  while (res > tol && rep.iterations < max_iter) {
    const double apap = inner(ap, ap);
    if (!(apap > 0.0) || !(rar > 0.0)) break;
    const double alpha = rar / apap;
    x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    ar = op(r);
    const double rar_next = inner(r, ar);
    const double beta = rar_next / rar;
    rar = rar_next;
    p *= beta;
    p += r;
    ap *= beta;
    ap += ar;
    ++rep.iterations;
    res = norm(r) / bnorm;
    rep.residual_history.push_back(res);
  }
  rep.residual = res;
  rep.converged = res <= tol;
  return rep;
}

inline GridOperator frame_operator(std::shared_ptr<const ShearletSystem> system, unsigned workers = 1) {
  return [system = std::move(system), workers](const Grid& g) { return frame_apply(g, system, {workers}); };
}

struct ReconstructOptions {
  double tol = 1e-8;
  std::size_t max_iter = 500;
  unsigned workers = 1;
  const Grid* initial = nullptr;  // warm start on the n-grid, projected onto the span
};

struct Reconstruction {
  Grid grid;
  SolveReport report;
};

// Canonical dual reconstruction inside the analyzable span V: solves
// P_V S P_V x = P_V T^* c by conjugate residuals on the coarse grid and returns
// x. For c = T g with g in V this returns g. On an exhausted budget the best
// iterate comes back with report.converged == false.
inline Reconstruction dual_reconstruct(const CoefficientSet& coeffs, std::size_t n, const ReconstructOptions& opt = {}) {
  if (!(opt.tol > 0.0) || opt.tol >= 1.0) fail(ErrorKind::InvalidArgument, "tolerance must lie in (0,1)");
  const BlockSpan span = analyzable_span(coeffs.system(), n);
  const Grid rhs = span.restrict(synthesize(coeffs, n, {opt.workers}));
  Grid x = opt.initial ? span.restrict(*opt.initial) : Grid(span.m);
  SolveReport rep = conjugate_residual(restricted(frame_operator(coeffs.system_ptr(), opt.workers), span), rhs, x,
                                       opt.tol, opt.max_iter);
  return {span.extend(x), std::move(rep)};
}

// Throwing variant for callers that treat an exhausted budget as an error.
inline Reconstruction dual_reconstruct_strict(const CoefficientSet& coeffs, std::size_t n,
                                              const ReconstructOptions& opt = {}) {
  Reconstruction r = dual_reconstruct(coeffs, n, opt);
  if (!r.report.converged)
    fail(ErrorKind::MaxIterExceeded, "no convergence after " + std::to_string(r.report.iterations) +
                                         " iterations (relative residual " + std::to_string(r.report.residual) + ")");
  return r;
}

struct FrameBounds {
  double lower = 0;  // A
  double upper = 0;  // B
  std::size_t upper_iterations = 0;
  std::size_t lower_iterations = 0;
  double upper_residual = 0;  // ||S v - B v|| / B at exit
  double lower_residual = 0;  // ||S v - A v|| / A at exit
  std::size_t inner_iterations = 0;
};

struct BoundsOptions {
  double tol = 1e-6;
  std::size_t max_iter = 500;
  std::size_t max_inner = 2000;
  std::uint64_t seed = 1;
};

namespace detail {

inline Grid random_grid(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  Grid g(n);
  CounterRng rng(seed, stream);
  for (double& v : g.values()) v = rng.normal();
  return g;
}

// Power iteration on op until the Rayleigh quotient settles to tol.
inline double power_iteration(const GridOperator& op, Grid v, double tol, std::size_t max_iter, std::size_t& iters,
                              double& residual) {
  v *= 1.0 / norm(v);
  double lambda = 0.0;
  iters = 0;
  residual = INFINITY;
  while (iters < max_iter) {
    Grid w = op(v);
    const double next = inner(v, w);
    ++iters;
    Grid r = w;
    r.axpy(-next, v);
    residual = norm(r) / std::abs(next);
    const double wn = norm(w);
    if (!(wn > 0.0)) return 0.0;
    const bool settled = std::abs(next - lambda) <= tol * std::abs(next) && residual <= std::sqrt(tol);
    lambda = next;
    v = std::move(w);
    v *= 1.0 / wn;
    if (settled) break;
  }
  return lambda;
}

}  // namespace detail

// B by power iteration on op over the full grid; A by inverse iteration
// (conjugate residual solves) on op restricted to `span`.
inline FrameBounds estimate_frame_bounds(const GridOperator& op, BlockSpan span, const BoundsOptions& opt = {}) {
  if (!(opt.tol > 0.0) || opt.tol >= 1.0) fail(ErrorKind::InvalidArgument, "tolerance must lie in (0,1)");
  FrameBounds fb;
  fb.upper = detail::power_iteration(op, detail::random_grid(span.n, opt.seed, 0), opt.tol, opt.max_iter,
                                     fb.upper_iterations, fb.upper_residual);
  if (!(fb.upper > 0.0)) fail(ErrorKind::NotAFrame, "frame operator vanishes");

  const GridOperator sv = restricted(op, span);
  const double inner_tol = std::max(opt.tol * 1e-2, 1e-14);
  Grid v = detail::random_grid(span.m, opt.seed, 1);
  v *= 1.0 / norm(v);
  double lambda = INFINITY;
  fb.lower_residual = INFINITY;
  while (fb.lower_iterations < opt.max_iter) {
    Grid w = v;  // warm start: v is close to an eigenvector, so S^{-1} v is close to v / lambda
    if (std::isfinite(lambda)) w *= 1.0 / lambda;
    const SolveReport rep = conjugate_residual(sv, v, w, inner_tol, opt.max_inner);
    fb.inner_iterations += rep.iterations;
    ++fb.lower_iterations;
    const double wn = norm(w);
    if (!(wn > 0.0)) break;
    w *= 1.0 / wn;
    const Grid sw = sv(w);
    const double next = inner(w, sw);
    Grid r = sw;
    r.axpy(-next, w);
    fb.lower_residual = norm(r) / std::abs(next);
    const bool settled = std::abs(next - lambda) <= opt.tol * std::abs(next) && fb.lower_residual <= std::sqrt(opt.tol);
    lambda = next;
    v = std::move(w);
    if (settled) break;
  }
  fb.lower = lambda;
  if (!(fb.lower >= 1e-10 * fb.upper))
    fail(ErrorKind::NotAFrame, "lower bound estimate " + std::to_string(fb.lower) + " is below 1e-10 * B");
  return fb;
}

inline FrameBounds estimate_frame_bounds(std::shared_ptr<const ShearletSystem> system, std::size_t n,
                                         const BoundsOptions& opt = {}, unsigned workers = 1) {
  detail::check_resolution(*system, n);
  const BlockSpan span = analyzable_span(*system, n);
  return estimate_frame_bounds(frame_operator(std::move(system), workers), span, opt);
}

}  // namespace shearsparse
