#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shearsparse/cartoon.hpp"
#include "shearsparse/error.hpp"
#include "shearsparse/fit.hpp"
#include "shearsparse/frame.hpp"
#include "shearsparse/transform.hpp"
#include "shearsparse/wavelet2d.hpp"

namespace shearsparse {

namespace detail {

// Storage positions of the N largest |v| among `candidates`; ties go to the
// earlier position. Returned in increasing position order.
inline std::vector<std::size_t> top_positions(std::span<const double> v, std::vector<std::size_t> candidates,
                                              std::size_t N) {
  auto before = [&](std::size_t a, std::size_t b) {
    const double x = std::abs(v[a]), y = std::abs(v[b]);
    return x != y ? x > y : a < b;
  };
  if (N < candidates.size()) {
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(N), candidates.end(), before);
    candidates.resize(N);
  }
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

// All positions sorted by decreasing |v|, ties by position.
inline std::vector<std::size_t> magnitude_order(std::span<const double> v, std::vector<std::size_t> candidates) {
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    const double x = std::abs(v[a]), y = std::abs(v[b]);
    return x != y ? x > y : a < b;
  });
  return candidates;
}

}  // namespace detail

// Keeps the N largest-magnitude coefficients; ties by lexicographic index order.
inline CoefficientSet threshold_topN(const CoefficientSet& coeffs, std::size_t N) {
  const auto& positions = coeffs.system().positions();
  if (N > positions.size()) fail(ErrorKind::InvalidArgument, "N exceeds the number of coefficients");
  CoefficientSet out(coeffs.system_ptr());
  for (std::size_t p : detail::top_positions(coeffs.dense(), positions, N)) out.dense()[p] = coeffs.dense()[p];
  return out;
}

// Sorted magnitudes |theta|_1 >= |theta|_2 >= ... of the enumerated coefficients.
inline std::vector<double> sorted_magnitudes(const CoefficientSet& coeffs) {
  std::vector<double> m;
  m.reserve(coeffs.total_count());
  for (std::size_t p : coeffs.system().positions()) m.push_back(std::abs(coeffs.dense()[p]));
  std::sort(m.begin(), m.end(), std::greater<>());
  return m;
}

// tail[N] = sum_{n > N} |theta|_n^2 for N = 0..size, summed from the small end.
inline std::vector<double> tail_sums(const std::vector<double>& sorted_desc) {
  std::vector<double> tail(sorted_desc.size() + 1, 0.0);
  for (std::size_t i = sorted_desc.size(); i-- > 0;) tail[i] = tail[i + 1] + sorted_desc[i] * sorted_desc[i];
  return tail;
}

struct ErrorPoint {
  std::size_t N = 0;
  double squared_error = 0;
  std::size_t iterations = 0;
  double wall_ms = 0;
  double tail = 0;  // sum of squared dropped coefficients
};

struct ErrorCurve {
  std::vector<ErrorPoint> points;
  std::string config_hash;
  double floor = 0;  // ||f - P f||^2, the part of f outside the reconstructable span

  bool non_increasing() const {
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i].squared_error > points[i - 1].squared_error) return false;
    return true;
  }
  std::vector<double> ns() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(static_cast<double>(p.N));
    return v;
  }
  std::vector<double> errors() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(p.squared_error);
    return v;
  }
  std::vector<double> tails() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(p.tail);
    return v;
  }
};

inline RateReport fit_rate(const ErrorCurve& curve, RateModel model, std::optional<double> fixed_log_exponent = std::nullopt,
                           double lo = 0.0, double hi = INFINITY) {
  return fit_rate(curve.ns(), curve.errors(), model, fixed_log_exponent, lo, hi);
}

struct NTermOptions {
  double tol = 1e-8;
  std::size_t max_iter = 500;
  unsigned workers = 1;
};

inline void check_ascending(const std::vector<std::size_t>& Ns, std::size_t limit) {
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (i > 0 && Ns[i] <= Ns[i - 1]) fail(ErrorKind::InvalidArgument, "N list must be strictly ascending");
    if (Ns[i] > limit) fail(ErrorKind::InvalidArgument, "N = " + std::to_string(Ns[i]) + " exceeds " + std::to_string(limit));
  }
}

// N-term errors of the grid g. The reference is P g, the dual reconstruction
// from all coefficients; errors are ||P g - g_N||^2 with g_N the dual
// reconstruction from the N largest coefficients. Solves run in ascending N,
// each warm-started from the previous one.
inline ErrorCurve nterm_error_curve(const Grid& g, std::shared_ptr<const ShearletSystem> system, const std::vector<std::size_t>& Ns,
                                    const NTermOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  check_ascending(Ns, system->index_count());
  const std::size_t n = g.size();
  const CoefficientSet coeffs = analyze(g, system, {opt.workers});
  const std::vector<std::size_t> order = detail::magnitude_order(coeffs.dense(), system->positions());
  const std::vector<double> tail = tail_sums(sorted_magnitudes(coeffs));

  ReconstructOptions ro{opt.tol, opt.max_iter, opt.workers, nullptr};
  Reconstruction full = dual_reconstruct(coeffs, n, ro);
  if (!full.report.converged)
    fail(ErrorKind::MaxIterExceeded, "reference reconstruction did not converge (residual " +
                                         std::to_string(full.report.residual) + ")");
  ErrorCurve curve;
  curve.floor = norm_sq(g - full.grid);

  Grid warm(n);
  CoefficientSet kept(system);
  std::size_t filled = 0;
  for (std::size_t N : Ns) {
    const auto t0 = clock::now();
    for (; filled < N; ++filled) kept.dense()[order[filled]] = coeffs.dense()[order[filled]];
    ro.initial = &warm;
    Reconstruction r = dual_reconstruct(kept, n, ro);
    if (!r.report.converged)
      fail(ErrorKind::MaxIterExceeded, "N = " + std::to_string(N) + ": no convergence after " +
                                           std::to_string(r.report.iterations) + " iterations");
    ErrorPoint p;
    p.N = N;
    p.squared_error = norm_sq(full.grid - r.grid);
    p.iterations = r.report.iterations;
    p.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    p.tail = tail[N];
    curve.points.push_back(p);
    warm = std::move(r.grid);
  }
  return curve;
}

inline ErrorCurve nterm_error_curve(const CartoonImage& f, std::shared_ptr<const ShearletSystem> system, std::size_t n,
                                    const std::vector<std::size_t>& Ns, const NTermOptions& opt = {},
                                    std::size_t oversample = 8) {
  detail::check_resolution(*system, n);
  return nterm_error_curve(rasterize(f, n, oversample, opt.workers), std::move(system), Ns, opt);
}

// Orthonormal wavelet N-term errors of the grid g (no iterative solve).
inline ErrorCurve wavelet_baseline(const Grid& g, int moments, const std::vector<std::size_t>& Ns) {
  using clock = std::chrono::steady_clock;
  const std::size_t n = g.size();
  if (!is_power_of_two(n)) fail(ErrorKind::InvalidArgument, "grid size must be a power of two");
  check_ascending(Ns, n * n);
  const Wavelet2D w(moments);
  const Grid c = w.forward(g);
  std::vector<std::size_t> all(n * n);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::vector<std::size_t> order = detail::magnitude_order(c.values(), std::move(all));
  std::vector<double> mags(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) mags[i] = std::abs(c.values()[order[i]]);
  const std::vector<double> tail = tail_sums(mags);

  ErrorCurve curve;
  Grid kept(n);
  std::size_t filled = 0;
  for (std::size_t N : Ns) {
    const auto t0 = clock::now();
    for (; filled < N; ++filled) kept.values()[order[filled]] = c.values()[order[filled]];
    const Grid approx = w.inverse(kept);
    ErrorPoint p;
    p.N = N;
    p.squared_error = norm_sq(g - approx);
    p.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    p.tail = tail[N];
    curve.points.push_back(p);
  }
  return curve;
}

inline ErrorCurve wavelet_baseline(const CartoonImage& f, std::size_t n, int moments, const std::vector<std::size_t>& Ns,
                                   std::size_t oversample = 8, unsigned workers = 1) {
  return wavelet_baseline(rasterize(f, n, oversample, workers), moments, Ns);
}

}  // namespace shearsparse
