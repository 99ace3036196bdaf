#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include "shearsparse/error.hpp"

namespace shearsparse {

// Extremal-phase Daubechies refinement filter with `moments` vanishing moments
// (2*moments taps), normalized so the taps sum to sqrt(2). moments == 1 is Haar.
//
// Spectral factorization: |L(w)|^2 = P(sin^2(w/2)) with
// P(y) = sum_{k<p} C(p-1+k, k) y^k; each root y_i of P yields the pair
// z, 1/z solving z + 1/z = 2 - 4 y_i and the factor inside the unit circle is kept.
inline std::vector<double> daubechies_lowpass(int moments) {
  if (moments < 1 || moments > 12) fail(ErrorKind::InvalidArgument, "daubechies order must lie in [1,12]");
  const int p = moments;
  using cplx = std::complex<double>;

  std::vector<cplx> poly{1.0};  // coefficients in ascending powers of u
  auto multiply = [&poly](cplx root) {
    std::vector<cplx> out(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      out[i + 1] += poly[i];
      out[i] -= root * poly[i];
    }
    poly = std::move(out);
  };
  for (int i = 0; i < p; ++i) multiply(-1.0);

  if (p > 1) {
    Eigen::VectorXd coeffs(p);
    double binom = 1.0;
    for (int k = 0; k < p; ++k) {
      coeffs(k) = binom;
      binom = binom * static_cast<double>(p + k) / static_cast<double>(k + 1);
    }
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(coeffs);
    for (const cplx& y : solver.roots()) {
      const cplx b = 2.0 - 4.0 * y;
      const cplx disc = std::sqrt(b * b - 4.0);
      cplx z = (b + disc) / 2.0;
      if (std::abs(z) > 1.0) z = (b - disc) / 2.0;
      multiply(z);
    }
  }

  std::vector<double> taps(poly.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    taps[i] = poly[i].real();
    sum += taps[i];
  }
  for (double& t : taps) t *= std::numbers::sqrt2 / sum;
  std::reverse(taps.begin(), taps.end());
  return taps;
}

// Quadrature-mirror high pass g_k = (-1)^k h_{N-1-k}.
inline std::vector<double> quadrature_mirror(const std::vector<double>& lowpass) {
  const std::size_t n = lowpass.size();
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass[n - 1 - k];
  return g;
}

}  // namespace shearsparse
