#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "shearsparse/approximation.hpp"
#include "shearsparse/cartoon.hpp"
#include "shearsparse/error.hpp"
#include "shearsparse/fit.hpp"
#include "shearsparse/system.hpp"
#include "shearsparse/transform.hpp"

namespace shearsparse {

inline constexpr std::size_t kBoundarySamples = 8192;

// Q_{j,p} = [-2^{-j/2}, 2^{-j/2}]^2 + 2^{-j/2} p
struct DyadicCube {
  int j = 0;
  std::int64_t p1 = 0, p2 = 0;

  double half_side() const { return std::exp2(-0.5 * j); }
  Point center() const { return half_side() * Point{static_cast<double>(p1), static_cast<double>(p2)}; }
  bool contains_interior(Point x) const {
    const Point d = x - center();
    return std::abs(d.x1) < half_side() && std::abs(d.x2) < half_side();
  }
};

// An edge point x = beta(theta) with tangent slope s (+infinity for a horizontal tangent).
struct EdgeProbe {
  RadiusProfile boundary;
  double theta = 0;
  Point point;
  double slope = 0;

  // The cube at scale j whose center is nearest to the probe point.
  DyadicCube cube(int j) const {
    const double h = std::exp2(-0.5 * j);
    return {j, std::llround(point.x1 / h), std::llround(point.x2 / h)};
  }
  bool vertical_tangent() const { return slope == 0.0; }
  bool horizontal_tangent() const { return std::isinf(slope); }
};

inline EdgeProbe make_probe(const RadiusProfile& boundary, double theta) {
  return {boundary, theta, boundary_point(boundary, theta), tangent_slope(boundary, theta)};
}

// kBoundarySamples equispaced-in-theta points of the boundary curve.
inline std::vector<Point> boundary_samples(const RadiusProfile& boundary, std::size_t count = kBoundarySamples) {
  std::vector<Point> pts(count);
  for (std::size_t i = 0; i < count; ++i)
    pts[i] = boundary_point(boundary, 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count));
  return pts;
}

// Enumerated translates of slab s whose open support contains one of the points.
inline std::vector<std::pair<std::int64_t, std::int64_t>> translates_meeting(const ShearletSystem& sys, const Slab& s,
                                                                            const std::vector<Point>& pts) {
  const double c = sys.c();
  const double L = sys.support();
  const Mat2 M = sys.transform({s.cone, s.j, s.k, 0, 0});
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const Point& x : pts) {
    const Point y = M(x);
    const auto lo1 = static_cast<std::int64_t>(std::floor((y.x1 - L) / c)) + 1;
    const auto hi1 = static_cast<std::int64_t>(std::ceil(y.x1 / c)) - 1;
    const auto lo2 = static_cast<std::int64_t>(std::floor((y.x2 - L) / c)) + 1;
    const auto hi2 = static_cast<std::int64_t>(std::ceil(y.x2 / c)) - 1;
    for (std::int64_t m1 = lo1; m1 <= hi1; ++m1)
      for (std::int64_t m2 = lo2; m2 <= hi2; ++m2) {
        const auto [mf, mc] = s.fine_coarse(m1, m2);
        if (s.is_valid(mf, mc)) out.emplace_back(m1, m2);
      }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct DecayRow {
  int j = 0;
  int k = 0;
  std::size_t translates = 0;  // |Lambda_{j,p}| restricted to this shear
  double max_coefficient = 0;
  double ratio = 0;
};

struct DecayTable {
  int regime = 1;
  std::vector<DecayRow> rows;
  std::vector<std::pair<int, double>> max_ratio_per_j;

  // max/min of the per-scale maxima over the last `count` scales.
  double spread(std::size_t count = 3) const {
    if (max_ratio_per_j.size() < count) fail(ErrorKind::InvalidArgument, "not enough scales for a spread");
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = max_ratio_per_j.size() - count; i < max_ratio_per_j.size(); ++i) {
      lo = std::min(lo, max_ratio_per_j[i].second);
      hi = std::max(hi, max_ratio_per_j[i].second);
    }
    return lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 0.0);
  }
};

// Regime 1 normalizer |k + 2^{j/2} s|^3 2^{3j/4}; the shear distance is floored
// at 1 since the bound says nothing for the aligned shears.
inline double regime1_weight(int j, int k, double s) {
  const double d = std::max(1.0, std::abs(k + std::exp2(0.5 * j) * s));
  return d * d * d * std::exp2(0.75 * j);
}

inline double regime2_weight(int j) { return std::exp2(2.25 * j); }

// Rows for one scale j: for each horizontal-cone shear the largest |<f,psi>|
// over translates whose support interior meets the boundary inside the probe
// cube, times the regime's normalizer. Returns the largest ratio.
inline double edge_decay_scale(const CoefficientSet& coeffs, const EdgeProbe& probe, int j, int regime,
                               std::vector<DecayRow>& rows) {
  if (regime != 1 && regime != 2) fail(ErrorKind::InvalidArgument, "regime must be 1 or 2");
  const double s = probe.slope;
  if (regime == 1 && !(std::abs(s) <= 3.0)) fail(ErrorKind::InvalidArgument, "regime 1 needs |s| <= 3");
  if (regime == 2 && !(std::abs(s) > 1.5)) fail(ErrorKind::InvalidArgument, "regime 2 needs |s| > 3/2");
  const ShearletSystem& sys = coeffs.system();
  if (j < 0 || j > sys.J()) fail(ErrorKind::InvalidArgument, "scale outside the system");
  const DyadicCube q = probe.cube(j);
  std::vector<Point> pts;
  for (const Point& x : boundary_samples(probe.boundary))
    if (q.contains_interior(x)) pts.push_back(x);
  double best = -1.0;
  for (const Slab& sl : sys.slabs()) {
    if (sl.cone != Cone::horizontal || sl.j != j) continue;
    DecayRow row{j, sl.k, 0, 0.0, 0.0};
    const auto ms = translates_meeting(sys, sl, pts);
    row.translates = ms.size();
    for (const auto& [m1, m2] : ms)
      row.max_coefficient = std::max(row.max_coefficient, std::abs(coeffs.at({Cone::horizontal, j, sl.k, m1, m2})));
    row.ratio = row.max_coefficient * (regime == 1 ? regime1_weight(j, sl.k, s) : regime2_weight(j));
    if (!ms.empty()) best = std::max(best, row.ratio);
    rows.push_back(row);
  }
  if (best < 0.0) fail(ErrorKind::NoIntersectingShearlets, "no shearlet at scale " + std::to_string(j) + " meets the probe");
  return best;
}

// Decay table from one coefficient set of the whole image.
inline DecayTable edge_coefficient_decay(const CoefficientSet& coeffs, const EdgeProbe& probe, int j_min, int j_max,
                                         int regime) {
  if (j_min < 0 || j_max > coeffs.system().J() || j_min > j_max)
    fail(ErrorKind::InvalidArgument, "scale range outside the system");
  DecayTable table;
  table.regime = regime;
  for (int j = j_min; j <= j_max; ++j) table.max_ratio_per_j.emplace_back(j, edge_decay_scale(coeffs, probe, j, regime, table.rows));
  return table;
}

// Tensor C-infinity bump equal to 1 at the cube center and supported on the
// cube scaled by pad about its center.
struct CubeWindow {
  Point center;
  double half = 1.0;

  double operator()(Point x) const { return bump((x.x1 - center.x1) / half) * bump((x.x2 - center.x2) / half); }

  static double bump(double t) { return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }
};

inline CubeWindow cube_window(const EdgeProbe& probe, int j, double pad) {
  if (!(pad > 0.0)) fail(ErrorKind::InvalidArgument, "window pad must be positive");
  const DyadicCube q = probe.cube(j);
  return {q.center(), q.half_side() * pad};
}

struct LocalizeOptions {
  double pad = 1.0;  // window half-side in units of the cube half-side; 0 disables the window
  std::size_t oversample = 8;
  unsigned workers = 1;
};

// Coefficients of f w_Q, the image cut to the probe cube at scale j by a smooth
// window, so boundary pieces far from the probe do not reach the long atoms.
inline CoefficientSet localized_coefficients(const CartoonImage& f, std::shared_ptr<const ShearletSystem> system,
                                             const EdgeProbe& probe, int j, std::size_t n, const LocalizeOptions& opt = {}) {
  detail::check_resolution(*system, n);
  if (opt.pad == 0.0) return analyze(rasterize(f, n, opt.oversample, opt.workers), std::move(system), {opt.workers});
  const CubeWindow w = cube_window(probe, j, opt.pad);
  return analyze(rasterize([&](Point x) { return f(x) * w(x); }, n, opt.oversample, opt.workers), std::move(system),
                 {opt.workers});
}

// Decay tables for the requested regimes with f localized to the probe cube
// afresh at every scale. One rasterization and analysis per scale serves all regimes.
inline std::vector<DecayTable> localized_edge_decay(const CartoonImage& f, std::shared_ptr<const ShearletSystem> system,
                                                    const EdgeProbe& probe, int j_min, int j_max,
                                                    const std::vector<int>& regimes, std::size_t n,
                                                    const LocalizeOptions& opt = {}) {
  if (j_min < 0 || j_max > system->J() || j_min > j_max) fail(ErrorKind::InvalidArgument, "scale range outside the system");
  std::vector<DecayTable> tables(regimes.size());
  for (std::size_t r = 0; r < regimes.size(); ++r) tables[r].regime = regimes[r];
  if (opt.pad == 0.0) {
    const CoefficientSet c = localized_coefficients(f, system, probe, j_min, n, opt);
    for (std::size_t r = 0; r < regimes.size(); ++r) tables[r] = edge_coefficient_decay(c, probe, j_min, j_max, regimes[r]);
    return tables;
  }
  for (int j = j_min; j <= j_max; ++j) {
    const CoefficientSet c = localized_coefficients(f, system, probe, j, n, opt);
    for (std::size_t r = 0; r < regimes.size(); ++r)
      tables[r].max_ratio_per_j.emplace_back(j, edge_decay_scale(c, probe, j, regimes[r], tables[r].rows));
  }
  return tables;
}

struct BesselCheck {
  std::vector<double> partial_sums;  // Sigma_J for J = 0..J_max
  double denominator = 0;            // ||d^2 g / dx1^2||_2^2
  std::vector<double> ratios;

  double final_increment() const {
    const std::size_t n = partial_sums.size();
    if (n < 2 || partial_sums[n - 2] == 0.0) return 0.0;
    return (partial_sums[n - 1] - partial_sums[n - 2]) / partial_sums[n - 2];
  }
};

// Midpoint quadrature of ||d^2 g / dx1^2||^2 on a q x q grid.
inline double second_derivative_norm_sq(const SmoothPatch& g, std::size_t q) {
  double s = 0.0;
  const double h = 1.0 / static_cast<double>(q);
  for (std::size_t b = 0; b < q; ++b)
    for (std::size_t a = 0; a < q; ++a) {
      const double v = g.jet({(static_cast<double>(a) + 0.5) * h, (static_cast<double>(b) + 0.5) * h}).d11;
      s += v * v;
    }
  return s * h * h;
}

// Partial sums of sum_{j<=J} sum_{k,m} 2^{4j} |<g, psi_{j,k,m}>|^2 over the
// horizontal cone, divided by ||d^2 g / dx1^2||^2.
inline BesselCheck smooth_bessel_check(const SmoothPatch& g, std::shared_ptr<const ShearletSystem> system, std::size_t n,
                                       std::size_t oversample = 8, unsigned workers = 1) {
  detail::check_resolution(*system, n);
  const CoefficientSet coeffs = analyze(rasterize(g, n, oversample, workers), system, {workers});
  BesselCheck out;
  out.denominator = second_derivative_norm_sq(g, n);
  std::vector<double> per_j(static_cast<std::size_t>(system->J() + 1), 0.0);
  for (const Slab& s : system->slabs()) {
    if (s.cone != Cone::horizontal) continue;
    double acc = 0.0;
    for (double v : coeffs.slab(s)) acc += v * v;
    per_j[static_cast<std::size_t>(s.j)] += std::exp2(4.0 * s.j) * acc;
  }
  double running = 0.0;
  for (double v : per_j) {
    running += v;
    out.partial_sums.push_back(running);
    out.ratios.push_back(out.denominator > 0.0 ? running / out.denominator : 0.0);
  }
  return out;
}

struct TailRate {
  std::vector<std::size_t> ns;
  std::vector<double> tails;
  RateReport report;
};

inline TailRate tail_rate(const std::vector<double>& sorted_desc, const std::vector<std::size_t>& Ns) {
  const std::vector<double> tail = tail_sums(sorted_desc);
  TailRate out;
  std::vector<double> x;
  for (std::size_t N : Ns) {
    if (N >= tail.size()) fail(ErrorKind::InvalidArgument, "N beyond the coefficient count");
    out.ns.push_back(N);
    out.tails.push_back(tail[N]);
    x.push_back(static_cast<double>(N));
  }
  out.report = fit_rate(x, out.tails, RateModel::pure_power);
  return out;
}

// Coefficient tails sum_{n>N} |theta(g)|_n^2 of an edge-free patch, fitted to C N^{-beta}.
inline TailRate smooth_part_rate(const SmoothPatch& g, std::shared_ptr<const ShearletSystem> system, std::size_t n,
                                 const std::vector<std::size_t>& Ns, std::size_t oversample = 8, unsigned workers = 1) {
  detail::check_resolution(*system, n);
  const CoefficientSet coeffs = analyze(rasterize(g, n, oversample, workers), system, {workers});
  return tail_rate(sorted_magnitudes(coeffs), Ns);
}

struct CountReport {
  std::vector<double> epsilons;
  std::vector<std::size_t> counts;
  double exponent = 0;         // count ~ eps^{-exponent}
  double log_exponent = 0;     // with the extra (log 1/eps) factor fitted
  double exponent_with_log = 0;
  double residual = 0;
};

// Coefficients divided by ||psi||_1, the normalization under which the scale
// cutoff j <= (4/3) log2(1/eps) applies.
inline std::vector<double> normalized_magnitudes(const CoefficientSet& coeffs) {
  std::vector<double> m = sorted_magnitudes(coeffs);
  const double scale = coeffs.system().spec().psi_norm_l1();
  for (double& v : m) v /= scale;
  return m;
}

inline std::size_t count_above(const std::vector<double>& sorted_desc, double eps) {
  return static_cast<std::size_t>(std::lower_bound(sorted_desc.begin(), sorted_desc.end(), eps, std::greater<>()) -
                                  sorted_desc.begin());
}

inline CountReport significant_count(const CoefficientSet& coeffs, const std::vector<double>& epsilons) {
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) fail(ErrorKind::InvalidArgument, "epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) fail(ErrorKind::InvalidArgument, "epsilons must be strictly descending");
  }
  const std::vector<double> mags = normalized_magnitudes(coeffs);
  CountReport r;
  r.epsilons = epsilons;
  std::vector<double> inv, cnt;
  for (double e : epsilons) {
    const std::size_t c = count_above(mags, e);
    r.counts.push_back(c);
    if (c > 0) {
      inv.push_back(1.0 / e);
      cnt.push_back(static_cast<double>(c));
    }
  }
  if (inv.size() >= 5) {
    // fit_rate models y ~ x^{-beta}; counts grow with 1/eps, so exponent = -beta.
    const RateReport pure = fit_rate(inv, cnt, RateModel::pure_power);
    r.exponent = -pure.beta;
    r.residual = pure.residual;
    const RateReport withlog = fit_rate(inv, cnt, RateModel::power_with_log);
    r.exponent_with_log = -withlog.beta;
    r.log_exponent = withlog.log_exponent;
  }
  return r;
}

// Log-spaced epsilons spanning `decades` decades below eps_max, descending.
inline std::vector<double> epsilon_ladder(double eps_max, double decades, std::size_t count) {
  if (count < 2) fail(ErrorKind::InvalidArgument, "need at least two epsilons");
  std::vector<double> e(count);
  for (std::size_t i = 0; i < count; ++i)
    e[i] = eps_max * std::pow(10.0, -decades * static_cast<double>(i) / static_cast<double>(count - 1));
  return e;
}

struct CubeCountRow {
  int j = 0;
  int k = 0;
  std::size_t intersecting = 0;
  double bound = 0;  // |k + 2^{j/2} s| + 1
  double ratio = 0;
  std::size_t significant = 0;
};

struct CubeCount {
  std::vector<CubeCountRow> rows;
  std::size_t significant_total = 0;
  double case1_bound = 0;  // (eps^{-1/3} 2^{-j/4} + 1)^2
  double crude_bound = 0;  // 2^j
  // max/min over k of intersecting / (|k + 2^{j/2} s| + 1), over rows with intersections.
  double spread() const {
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : rows)
      if (r.intersecting > 0) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
      }
    return hi > 0.0 ? hi / lo : 0.0;
  }
};

// Per-shear counts at one scale for the probe cube: intersecting translates
// against |k + 2^{j/2} s| + 1, and those with normalized |<f,psi>| > eps.
inline CubeCount per_cube_count(const CoefficientSet& coeffs, const EdgeProbe& probe, int j, double eps) {
  if (std::isinf(probe.slope)) fail(ErrorKind::InvalidArgument, "per-cube counting needs a finite slope");
  const ShearletSystem& sys = coeffs.system();
  if (j < 0 || j > sys.J()) fail(ErrorKind::InvalidArgument, "scale outside the system");
  const double scale = sys.spec().psi_norm_l1();
  const DyadicCube q = probe.cube(j);
  std::vector<Point> pts;
  for (const Point& x : boundary_samples(probe.boundary))
    if (q.contains_interior(x)) pts.push_back(x);

  CubeCount out;
  for (const Slab& sl : sys.slabs()) {
    if (sl.cone != Cone::horizontal || sl.j != j) continue;
    CubeCountRow row;
    row.j = j;
    row.k = sl.k;
    const auto ms = translates_meeting(sys, sl, pts);
    row.intersecting = ms.size();
    row.bound = std::abs(sl.k + std::exp2(0.5 * j) * probe.slope) + 1.0;
    row.ratio = static_cast<double>(row.intersecting) / row.bound;
    for (const auto& [m1, m2] : ms)
      if (std::abs(coeffs.at({Cone::horizontal, j, sl.k, m1, m2})) / scale > eps) ++row.significant;
    out.significant_total += row.significant;
    out.rows.push_back(row);
  }
  if (std::none_of(out.rows.begin(), out.rows.end(), [](const CubeCountRow& r) { return r.intersecting > 0; }))
    fail(ErrorKind::NoIntersectingShearlets, "no shearlet at scale " + std::to_string(j) + " meets the probe");
  const double b = std::pow(eps, -1.0 / 3.0) * std::exp2(-0.25 * j) + 1.0;
  out.case1_bound = b * b;
  out.crude_bound = std::exp2(j);
  return out;
}

// Number of cubes Q_{j,p} (p over Z^2) whose interior contains a boundary sample.
inline std::size_t boundary_cube_count(const RadiusProfile& boundary, int j) {
  const double h = std::exp2(-0.5 * j);
  std::vector<std::pair<std::int64_t, std::int64_t>> cells;
  for (const Point& x : boundary_samples(boundary)) {
    // x lies in the open cube around p iff |x/h - p| < 1 componentwise.
    const double u1 = x.x1 / h, u2 = x.x2 / h;
    for (auto p1 = static_cast<std::int64_t>(std::floor(u1 - 1.0)); p1 <= static_cast<std::int64_t>(std::ceil(u1 + 1.0)); ++p1)
      for (auto p2 = static_cast<std::int64_t>(std::floor(u2 - 1.0)); p2 <= static_cast<std::int64_t>(std::ceil(u2 + 1.0)); ++p2)
        if (std::abs(u1 - static_cast<double>(p1)) < 1.0 && std::abs(u2 - static_cast<double>(p2)) < 1.0) cells.emplace_back(p1, p2);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells.size();
}

}  // namespace shearsparse
