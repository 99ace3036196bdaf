#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shearsparse/error.hpp"

namespace shearsparse {

// A function sampled on the dyadic grid start + i * 2^-depth, read back by
// linear interpolation and identically zero outside the sampled interval.
class Tabulated1D {
 public:
  Tabulated1D() = default;
  Tabulated1D(double start, int depth, std::vector<double> values)
      : start_(start), depth_(depth), step_(std::ldexp(1.0, -depth)), values_(std::move(values)) {}

  double start() const noexcept { return start_; }
  double end() const noexcept { return start_ + step_ * static_cast<double>(values_.size() - 1); }
  double step() const noexcept { return step_; }
  int depth() const noexcept { return depth_; }
  std::span<const double> values() const noexcept { return values_; }

  double operator()(double x) const noexcept {
    const double t = (x - start_) / step_;
    if (!(t > 0.0) || t >= static_cast<double>(values_.size() - 1)) return 0.0;
    const auto i = static_cast<std::size_t>(t);
    const double w = t - static_cast<double>(i);
    return values_[i] + w * (values_[i + 1] - values_[i]);
  }

  // Riemann sum of x^l f(x) over the tabulation nodes.
  double moment(int l) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double x = start_ + step_ * static_cast<double>(i);
      s += std::pow(x, l) * values_[i];
    }
    return s * step_;
  }

  double norm_l1() const {
    double s = 0.0;
    for (double v : values_) s += std::abs(v);
    return s * step_;
  }

  double norm_l2_sq() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s * step_;
  }

  // Samples this tabulation onto a coarser dyadic depth (exact subsampling).
  Tabulated1D coarsened(int depth) const {
    if (depth > depth_) fail(ErrorKind::InvalidArgument, "cannot refine a tabulation by subsampling");
    const std::size_t stride = std::size_t{1} << (depth_ - depth);
    std::vector<double> v;
    for (std::size_t i = 0; i < values_.size(); i += stride) v.push_back(values_[i]);
    return {start_, depth, std::move(v)};
  }

 private:
  double start_ = 0.0;
  int depth_ = 0;
  double step_ = 1.0;
  std::vector<double> values_;
};

struct RefinablePair {
  Tabulated1D scaling;
  Tabulated1D wavelet;
};

// Cascade (dyadic refinement) tabulation of the scaling function and wavelet
// of an orthonormal two-scale filter, both supported on [0, N-1].
//
// Integer samples come from the eigenvector of [sqrt2 h_{2i-k}] for eigenvalue 1
// normalized to sum 1; each further level fills the odd dyadic points via
// phi(x) = sqrt2 sum_k h_k phi(2x - k), so every tabulated value is the exact
// point value of the limit function, and depths d and d+1 agree on shared nodes.
inline RefinablePair cascade(const std::vector<double>& lowpass, int depth) {
  const int taps = static_cast<int>(lowpass.size());
  if (taps < 2 || taps % 2 != 0) fail(ErrorKind::InvalidArgument, "refinement filter needs an even tap count");
  if (depth < 1 || depth > 20) fail(ErrorKind::InvalidArgument, "cascade depth must lie in [1,20]");
  const int support = taps - 1;
  const double r2 = std::numbers::sqrt2;

  const std::size_t per_unit = std::size_t{1} << depth;
  const std::size_t count = static_cast<std::size_t>(support) * per_unit + 1;
  std::vector<double> phi(count, 0.0);

  if (taps == 2) {
    // Haar: the box on [0,1), sampled left-continuously.
    for (std::size_t i = 0; i < per_unit; ++i) phi[i] = 1.0;
  } else {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(support + 1, support + 1);
    for (int i = 0; i <= support; ++i)
      for (int k = 0; k <= support; ++k) {
        const int tap = 2 * i - k;
        if (tap >= 0 && tap < taps) m(i, k) = r2 * lowpass[tap];
      }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    int best = 0;
    for (int i = 1; i <= support; ++i)
      if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = i;
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    v /= v.sum();
    for (int i = 0; i <= support; ++i) phi[static_cast<std::size_t>(i) * per_unit] = v(i);

    for (int level = 1; level <= depth; ++level) {
      const std::size_t stride = per_unit >> level;  // spacing of the new nodes
      for (std::size_t idx = stride; idx < count; idx += 2 * stride) {
        // x = idx / per_unit; phi(2x - k) sits at 2*idx - k*per_unit.
        double s = 0.0;
        for (int k = 0; k < taps; ++k) {
          const long long at = 2 * static_cast<long long>(idx) - static_cast<long long>(k) * static_cast<long long>(per_unit);
          if (at >= 0 && at < static_cast<long long>(count)) s += lowpass[k] * phi[static_cast<std::size_t>(at)];
        }
        phi[idx] = r2 * s;
      }
    }
  }

  // psi(x) = sqrt2 sum_k g_k phi(2x - k); 2x - k lands on the same dyadic grid.
  std::vector<double> psi(count, 0.0);
  for (std::size_t idx = 0; idx < count; ++idx) {
    double s = 0.0;
    for (int k = 0; k < taps; ++k) {
      const double gk = (k % 2 == 0 ? 1.0 : -1.0) * lowpass[taps - 1 - k];
      const long long at = 2 * static_cast<long long>(idx) - static_cast<long long>(k) * static_cast<long long>(per_unit);
      if (at >= 0 && at < static_cast<long long>(count)) s += gk * phi[static_cast<std::size_t>(at)];
    }
    psi[idx] = r2 * s;
  }

  return {Tabulated1D(0.0, depth, std::move(phi)), Tabulated1D(0.0, depth, std::move(psi))};
}

}  // namespace shearsparse
