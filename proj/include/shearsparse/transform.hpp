#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "shearsparse/error.hpp"
#include "shearsparse/grid.hpp"
#include "shearsparse/parallel.hpp"
#include "shearsparse/system.hpp"

namespace shearsparse {

// Coefficients <f, psi_lambda> of one system, stored as dense (cone, j, k) slabs
// over their m-rectangles. Rectangle entries outside the enumerated set are zero.
class CoefficientSet {
 public:
  CoefficientSet() = default;
  explicit CoefficientSet(std::shared_ptr<const ShearletSystem> system)
      : system_(std::move(system)), data_(system_->dense_size(), 0.0) {}

  const ShearletSystem& system() const { return *system_; }
  std::shared_ptr<const ShearletSystem> system_ptr() const { return system_; }
  std::size_t total_count() const { return system_->index_count(); }

  std::span<double> dense() noexcept { return data_; }
  std::span<const double> dense() const noexcept { return data_; }

  std::span<const double> slab(const Slab& s) const { return {data_.data() + s.offset, s.dense_size()}; }
  std::span<double> slab(const Slab& s) { return {data_.data() + s.offset, s.dense_size()}; }

  double at(const ShearletIndex& idx) const {
    const Slab* s = system_->find_slab(idx.cone, idx.j, idx.k);
    if (!s) fail(ErrorKind::InvalidArgument, "index outside system");
    const auto [mf, mc] = s->fine_coarse(idx.m1, idx.m2);
    if (!s->is_valid(mf, mc)) fail(ErrorKind::InvalidArgument, "index not enumerated");
    return data_[s->position(mf, mc)];
  }

  // Sum of c_lambda d_lambda over enumerated indices.
  friend double inner(const CoefficientSet& a, const CoefficientSet& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data_.size(); ++i) s += a.data_[i] * b.data_[i];
    return s;
  }
  friend double norm_sq(const CoefficientSet& a) { return inner(a, a); }

 private:
  std::shared_ptr<const ShearletSystem> system_;
  std::vector<double> data_;
};

struct TransformOptions {
  unsigned workers = 1;
};

namespace detail {

// For one image row at coarse coordinate x_c, the fine-direction samples of
// F(a_f x_f + s x_c - c m_f) at x_f = (a + 1/2)/n are w[i] at a = a0 + i.
class RowFilter {
 public:
  RowFilter(const Slab& slab, const Tabulated1D& fine, double c, std::size_t n)
      : slab_(slab), fine_(fine), c_(c), n_(static_cast<std::int64_t>(n)),
        delta_(slab.fine_scale / static_cast<double>(n)),
        taps_(static_cast<std::size_t>(std::ceil(fine.end() / delta_)) + 1),
        stride_(c / delta_), integral_stride_(std::floor(stride_) == stride_),
        w_(taps_) {}

  void start_row(double xc) {
    xc_ = xc;
    base_t0_ = (c_ * static_cast<double>(slab_.mf_min) - slab_.shear * xc) / delta_ - 0.5;
    base_a0_ = static_cast<std::int64_t>(std::floor(base_t0_)) + 1;
    fill(static_cast<double>(base_a0_) - base_t0_);
  }

  // Returns a0 for this m_f and refreshes w() when the sub-pixel phase changes.
  std::int64_t seek(std::int64_t mf) {
    const std::int64_t step = mf - slab_.mf_min;
    if (integral_stride_) return base_a0_ + step * static_cast<std::int64_t>(stride_);
    const double t0 = (c_ * static_cast<double>(mf) - slab_.shear * xc_) / delta_ - 0.5;
    const auto a0 = static_cast<std::int64_t>(std::floor(t0)) + 1;
    fill(static_cast<double>(a0) - t0);
    return a0;
  }

  // m_f whose fine support meets (0,1) on this row.
  std::pair<std::int64_t, std::int64_t> active() const {
    const double u = slab_.shear * xc_;
    const auto lo = static_cast<std::int64_t>(std::floor((u - fine_.end()) / c_)) + 1;
    const auto hi = static_cast<std::int64_t>(std::ceil((slab_.fine_scale + u) / c_)) - 1;
    return {std::max(lo, slab_.mf_min), std::min(hi, slab_.mf_max)};
  }

  std::span<const double> w() const { return w_; }
  std::size_t taps() const { return taps_; }

  // Clip [a0, a0 + taps) to [0, n) as tap indices.
  std::pair<std::size_t, std::size_t> clip(std::int64_t a0) const {
    const std::int64_t lo = std::max<std::int64_t>(0, -a0);
    const std::int64_t hi = std::min<std::int64_t>(static_cast<std::int64_t>(taps_), n_ - a0);
    if (hi <= lo) return {0, 0};
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
  }

 private:
  void fill(double frac) {
    for (std::size_t i = 0; i < taps_; ++i) w_[i] = fine_(delta_ * (static_cast<double>(i) + frac));
  }

  const Slab& slab_;
  const Tabulated1D& fine_;
  double c_;
  std::int64_t n_;
  double delta_;
  std::size_t taps_;
  double stride_;
  bool integral_stride_;
  std::vector<double> w_;
  double xc_ = 0, base_t0_ = 0;
  std::int64_t base_a0_ = 0;
};

// Rows b whose centers fall strictly inside the coarse support of m_c.
inline std::pair<std::size_t, std::size_t> coarse_rows(const Slab& s, std::int64_t mc, double c, double support,
                                                       std::size_t n) {
  const double nd = static_cast<double>(n);
  const double lo = c * static_cast<double>(mc) / s.coarse_scale;
  const double hi = (c * static_cast<double>(mc) + support) / s.coarse_scale;
  const double b_lo = std::max(0.0, std::floor(lo * nd - 0.5));
  const double b_hi = std::min(nd, std::ceil(hi * nd - 0.5) + 1.0);
  if (b_hi <= b_lo) return {0, 0};
  return {static_cast<std::size_t>(b_lo), static_cast<std::size_t>(b_hi)};
}

inline const Tabulated1D& fine_function(const ShearletSystem& sys, const Slab& s) {
  return s.cone == Cone::coarse ? sys.spec().psi2 : sys.spec().psi1;
}

// <g, atoms of slab s> for g oriented with rows along the slab's coarse coordinate.
inline void analyze_slab(const ShearletSystem& sys, const Slab& s, const Grid& g, std::span<double> out) {
  const std::size_t n = g.size();
  const std::size_t nmf = static_cast<std::size_t>(s.mf_max - s.mf_min + 1);
  if (s.valid == 0) return;
  const double h = g.pixel();
  const double c = sys.c();
  const Tabulated1D& coarse = sys.spec().psi2;

  std::vector<double> r(n * nmf, 0.0);
  std::vector<char> row_used(n, 0);
  for (std::int64_t mc = s.mc_lo; mc <= s.mc_hi; ++mc) {
    const auto& range = s.mf_ranges[static_cast<std::size_t>(mc - s.mc_lo)];
    if (range.first > range.second) continue;
    const auto [b0, b1] = coarse_rows(s, mc, c, sys.support(), n);
    for (std::size_t b = b0; b < b1; ++b) row_used[b] = 1;
  }

  RowFilter filter(s, fine_function(sys, s), c, n);
  for (std::size_t b = 0; b < n; ++b) {
    if (!row_used[b]) continue;
    filter.start_row(g.center(b));
    const auto row = g.row(b);
    double* rb = r.data() + b * nmf;
    const auto [lo, hi] = filter.active();
    for (std::int64_t mf = lo; mf <= hi; ++mf) {
      const std::int64_t a0 = filter.seek(mf);
      const auto [i0, i1] = filter.clip(a0);
      const auto w = filter.w();
      double acc = 0.0;
      const double* src = row.data() + (a0 + static_cast<std::int64_t>(i0));
      for (std::size_t i = i0; i < i1; ++i) acc += src[i - i0] * w[i];
      rb[mf - s.mf_min] = acc;
    }
  }

  const double scale = s.normalization * h * h;
  std::vector<double> acc(nmf);
  for (std::int64_t mc = s.mc_lo; mc <= s.mc_hi; ++mc) {
    const auto& range = s.mf_ranges[static_cast<std::size_t>(mc - s.mc_lo)];
    if (range.first > range.second) continue;
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto [b0, b1] = coarse_rows(s, mc, c, sys.support(), n);
    for (std::size_t b = b0; b < b1; ++b) {
      const double wgt = coarse(s.coarse_scale * g.center(b) - c * static_cast<double>(mc));
      if (wgt == 0.0) continue;
      const double* rb = r.data() + b * nmf;
      for (std::int64_t mf = range.first; mf <= range.second; ++mf) acc[mf - s.mf_min] += wgt * rb[mf - s.mf_min];
    }
    for (std::int64_t mf = range.first; mf <= range.second; ++mf)
      out[s.position(mf, mc) - s.offset] = scale * acc[mf - s.mf_min];
  }
}

// Adjoint of analyze_slab: writes sum_m c_m psi_m(x_p) into `out` (oriented).
inline void synthesize_slab(const ShearletSystem& sys, const Slab& s, std::span<const double> coeffs, Grid& out) {
  const std::size_t n = out.size();
  if (s.valid == 0) return;
  const std::size_t nmf = static_cast<std::size_t>(s.mf_max - s.mf_min + 1);
  const double c = sys.c();
  const Tabulated1D& coarse = sys.spec().psi2;

  std::vector<double> q(n * nmf, 0.0);
  std::vector<char> row_used(n, 0);
  for (std::int64_t mc = s.mc_lo; mc <= s.mc_hi; ++mc) {
    const auto& range = s.mf_ranges[static_cast<std::size_t>(mc - s.mc_lo)];
    if (range.first > range.second) continue;
    const auto [b0, b1] = coarse_rows(s, mc, c, sys.support(), n);
    for (std::size_t b = b0; b < b1; ++b) {
      const double wgt = coarse(s.coarse_scale * out.center(b) - c * static_cast<double>(mc));
      if (wgt == 0.0) continue;
      row_used[b] = 1;
      double* qb = q.data() + b * nmf;
      for (std::int64_t mf = range.first; mf <= range.second; ++mf)
        qb[mf - s.mf_min] += wgt * s.normalization * coeffs[s.position(mf, mc) - s.offset];
    }
  }

  RowFilter filter(s, fine_function(sys, s), c, n);
  for (std::size_t b = 0; b < n; ++b) {
    if (!row_used[b]) continue;
    filter.start_row(out.center(b));
    auto row = out.row(b);
    const double* qb = q.data() + b * nmf;
    const auto [lo, hi] = filter.active();
    for (std::int64_t mf = lo; mf <= hi; ++mf) {
      const double v = qb[mf - s.mf_min];
      if (v == 0.0) continue;
      const std::int64_t a0 = filter.seek(mf);
      const auto [i0, i1] = filter.clip(a0);
      const auto w = filter.w();
      double* dst = row.data() + (a0 + static_cast<std::int64_t>(i0));
      for (std::size_t i = i0; i < i1; ++i) dst[i - i0] += v * w[i];
    }
  }
}

inline void check_resolution(const ShearletSystem& sys, std::size_t n) {
  if (!is_power_of_two(n)) fail(ErrorKind::InvalidArgument, "grid size must be a power of two");
  if (n < sys.min_grid_size())
    fail(ErrorKind::ResolutionTooCoarse, "grid of size " + std::to_string(n) + " is coarser than the " +
                                             std::to_string(sys.min_grid_size()) + " samples the finest scale needs");
}

}  // namespace detail

inline CoefficientSet analyze(const Grid& grid, std::shared_ptr<const ShearletSystem> system,
                              const TransformOptions& opt = {}) {
  detail::check_resolution(*system, grid.size());
  CoefficientSet out(system);
  const Grid transposed = grid.transposed();
  const auto& slabs = system->slabs();
  auto dense = out.dense();
  parallel_for(slabs.size(), opt.workers, [&](std::size_t i) {
    const Slab& s = slabs[i];
    detail::analyze_slab(*system, s, s.cone == Cone::vertical ? transposed : grid, dense.subspan(s.offset, s.dense_size()));
  });
  return out;
}

// Adjoint of analyze with respect to the L2 grid inner product and the plain
// coefficient inner product. Slab contributions are summed in slab order, so
// the result does not depend on the worker count.
inline Grid synthesize(const CoefficientSet& coeffs, std::size_t n, const TransformOptions& opt = {}) {
  const ShearletSystem& system = coeffs.system();
  detail::check_resolution(system, n);
  const auto& slabs = system.slabs();
  Grid direct(n), transposed(n);
  const unsigned batch = std::max(1u, opt.workers);
  std::vector<Grid> scratch(std::min<std::size_t>(batch, slabs.size()), Grid(n));
  for (std::size_t first = 0; first < slabs.size(); first += batch) {
    const std::size_t count = std::min<std::size_t>(batch, slabs.size() - first);
    parallel_for(count, opt.workers, [&](std::size_t i) {
      Grid& g = scratch[i];
      std::fill(g.values().begin(), g.values().end(), 0.0);
      const Slab& s = slabs[first + i];
      detail::synthesize_slab(system, s, coeffs.slab(s), g);
    });
    for (std::size_t i = 0; i < count; ++i) (slabs[first + i].cone == Cone::vertical ? transposed : direct) += scratch[i];
  }
  direct += transposed.transposed();
  return direct;
}

inline Grid frame_apply(const Grid& grid, std::shared_ptr<const ShearletSystem> system, const TransformOptions& opt = {}) {
  return synthesize(analyze(grid, std::move(system), opt), grid.size(), opt);
}

}  // namespace shearsparse
