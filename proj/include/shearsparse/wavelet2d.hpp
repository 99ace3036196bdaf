#pragma once

#include <cstddef>
#include <vector>

#include "shearsparse/error.hpp"
#include "shearsparse/filters.hpp"
#include "shearsparse/grid.hpp"

namespace shearsparse {

// Periodized orthonormal separable 2-D wavelet transform in Mallat layout.
// Coefficients are those of the grid read as sum_p g_p h 1_{pixel p}, so the
// squared coefficient sum equals the L2 norm of the grid.
class Wavelet2D {
 public:
  explicit Wavelet2D(int moments) : low_(daubechies_lowpass(moments)), high_(quadrature_mirror(low_)) {}
  explicit Wavelet2D(std::vector<double> lowpass) : low_(std::move(lowpass)), high_(quadrature_mirror(low_)) {}

  const std::vector<double>& lowpass() const noexcept { return low_; }

  // Decompose while the low band stays at least as long as the filter.
  int levels(std::size_t n) const {
    int l = 0;
    for (std::size_t m = n; m / 2 >= low_.size() && m % 2 == 0; m /= 2) ++l;
    return l;
  }

  Grid forward(const Grid& g) const {
    const std::size_t n = g.size();
    Grid c = g;
    c *= g.pixel();
    std::vector<double> in, out;
    for (std::size_t m = n, l = 0; l < static_cast<std::size_t>(levels(n)); m /= 2, ++l) {
      for (std::size_t b = 0; b < m; ++b) step_forward(&c(b, 0), 1, m, in, out);
      for (std::size_t a = 0; a < m; ++a) step_forward(&c(0, a), n, m, in, out);
    }
    return c;
  }

  Grid inverse(const Grid& coeffs) const {
    const std::size_t n = coeffs.size();
    Grid g = coeffs;
    const int lv = levels(n);
    std::vector<double> in, out;
    for (int l = lv - 1; l >= 0; --l) {
      const std::size_t m = n >> l;
      for (std::size_t a = 0; a < m; ++a) step_inverse(&g(0, a), n, m, in, out);
      for (std::size_t b = 0; b < m; ++b) step_inverse(&g(b, 0), 1, m, in, out);
    }
    g *= static_cast<double>(n);
    return g;
  }

 private:
  void step_forward(double* x, std::size_t stride, std::size_t m, std::vector<double>& in,
                    std::vector<double>& out) const {
    in.resize(m);
    out.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) in[i] = x[i * stride];
    const std::size_t half = m / 2;
    for (std::size_t i = 0; i < half; ++i) {
      double a = 0.0, d = 0.0;
      for (std::size_t k = 0; k < low_.size(); ++k) {
        const double v = in[(2 * i + k) % m];
        a += low_[k] * v;
        d += high_[k] * v;
      }
      out[i] = a;
      out[half + i] = d;
    }
    for (std::size_t i = 0; i < m; ++i) x[i * stride] = out[i];
  }

  void step_inverse(double* x, std::size_t stride, std::size_t m, std::vector<double>& in,
                    std::vector<double>& out) const {
    in.resize(m);
    out.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) in[i] = x[i * stride];
    const std::size_t half = m / 2;
    for (std::size_t i = 0; i < half; ++i)
      for (std::size_t k = 0; k < low_.size(); ++k) out[(2 * i + k) % m] += low_[k] * in[i] + high_[k] * in[half + i];
    for (std::size_t i = 0; i < m; ++i) x[i * stride] = out[i];
  }

  std::vector<double> low_;
  std::vector<double> high_;
};

}  // namespace shearsparse
