#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "shearsparse/error.hpp"
#include "shearsparse/generator.hpp"

namespace shearsparse {

using Complex = std::complex<double>;

// hat f(xi) = int f(x) exp(-2 pi i x xi) dx by the Riemann sum over the tabulation
// nodes, with x^power inserted (power 1 gives i/(2 pi) times the derivative).
inline Complex fourier_sample(const Tabulated1D& f, double xi, int power = 0) {
  const auto v = f.values();
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = f.start() + f.step() * static_cast<double>(i);
    const double a = -2.0 * std::numbers::pi * x * xi;
    const double w = power == 0 ? v[i] : v[i] * std::pow(x, power);
    re += w * std::cos(a);
    im += w * std::sin(a);
  }
  return {re * f.step(), im * f.step()};
}

// The Fourier side of a separable generator psi = psi1 (x) psi2.
// psi2_hat_prime is d/dxi of psi2_hat, which gives d/dxi2 of psi_hat up to the psi1 factor.
struct SeparableSpectrum {
  std::function<Complex(double)> psi1_hat;
  std::function<Complex(double)> psi2_hat;
  std::function<Complex(double)> psi2_hat_prime;
};

inline SeparableSpectrum spectrum_of(const GeneratorSpec& spec) {
  const Tabulated1D psi1 = spec.psi1;
  const Tabulated1D psi2 = spec.psi2;
  return {[psi1](double xi) { return fourier_sample(psi1, xi); },
          [psi2](double xi) { return fourier_sample(psi2, xi); },
          [psi2](double xi) { return Complex(0.0, -2.0 * std::numbers::pi) * fourier_sample(psi2, xi, 1); }};
}

struct ConditionRow {
  std::string condition;  // "i" or "ii"
  std::string region;
  double fitted_exponent = 0;
  double C1 = 0;  // for condition ii: the integral of the fitted h over the grid
  double target = 0;
  bool pass = false;
};

struct DecayReport {
  double alpha = 0;
  double gamma = 0;
  double freq_extent = 0;
  std::size_t samples = 0;
  double C1 = 0;  // smallest admissible constant for (i) on the whole grid
  std::vector<double> xi;
  std::vector<double> h;  // fitted envelope for (ii) at each grid xi1
  std::vector<ConditionRow> rows;

  bool pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConditionRow& r) { return r.pass; });
  }

  std::string failed_regions() const {
    std::string s;
    for (const auto& r : rows)
      if (!r.pass) s += (s.empty() ? "" : ", ") + r.condition + ":" + r.region;
    return s;
  }

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "condition,region,fitted_exponent,C1,pass\n";
    for (const auto& r : rows)
      os << r.condition << ',' << r.region << ',' << r.fitted_exponent << ',' << r.C1 << ',' << (r.pass ? 1 : 0)
         << '\n';
    return os.str();
  }
};

// Exponents below this relative level are quadrature noise, not signal.
inline constexpr double kSpectrumFloor = 1e-13;

namespace detail {

inline double envelope(double xi1, double xi2, double alpha, double gamma) {
  const double a = std::abs(xi1), b = std::abs(xi2);
  double e = std::min(1.0, std::pow(a, alpha)) * std::min(1.0, std::pow(a, -gamma));
  return e * std::min(1.0, std::pow(b, -gamma));
}

// Least-squares slope of log y against log x; +inf when every y is zero.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > floor)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++n;
  }
  if (n == 0) return INFINITY;
  if (n < 2) return NAN;
  const double d = static_cast<double>(n) * sxx - sx * sx;
  return (static_cast<double>(n) * sxy - sx * sy) / d;
}

inline std::vector<double> geometric(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  return v;
}

// Upper envelope max_{x' >= x} |f(x')| on increasing abscissae, so oscillation
// zeros do not corrupt the tail fit.
inline std::vector<double> upper_envelope(std::vector<double> v) {
  for (std::size_t i = v.size(); i-- > 1;) v[i - 1] = std::max(v[i - 1], v[i]);
  return v;
}

}  // namespace detail

// Checks the Fourier decay conditions on the symmetric grid of `samples` points
// per axis over [-freq_extent, freq_extent]^2.
//  (i)  |psi_hat| <= C1 min(1,|xi1|^alpha) min(1,|xi1|^-gamma) min(1,|xi2|^-gamma)
//  (ii) |d/dxi2 psi_hat| <= |h(xi1)| (1 + |xi2|/|xi1|)^-gamma with h integrable
// Each region passes when its ratio is finite on the grid and the fitted exponent
// meets the target; h is fitted as the smallest function satisfying (ii) on the grid.
inline DecayReport verify_decay_conditions(const SeparableSpectrum& s, double alpha, double gamma,
                                           double freq_extent, std::size_t samples) {
  if (!(freq_extent >= 64.0)) fail(ErrorKind::InvalidArgument, "freq_extent must be at least 64");
  if (samples < 16) fail(ErrorKind::InvalidArgument, "at least 16 frequency samples are required");
  if (samples % 2 == 0) ++samples;  // keep xi = 0 on the grid
  constexpr double slack = 0.1;     // exponent tolerance of the log-log fits

  DecayReport rep;
  rep.alpha = alpha;
  rep.gamma = gamma;
  rep.freq_extent = freq_extent;
  rep.samples = samples;
  const std::size_t half = samples / 2;
  rep.xi.resize(samples);
  for (std::size_t i = 0; i < samples; ++i)
    rep.xi[i] = freq_extent * (static_cast<double>(i) - static_cast<double>(half)) / static_cast<double>(half);

  std::vector<double> a1(samples), a2(samples), d2(samples);
  double scale1 = 0, scale2 = 0, scaled = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    a1[i] = std::abs(s.psi1_hat(rep.xi[i]));
    a2[i] = std::abs(s.psi2_hat(rep.xi[i]));
    d2[i] = std::abs(s.psi2_hat_prime(rep.xi[i]));
    scale1 = std::max(scale1, a1[i]);
    scale2 = std::max(scale2, a2[i]);
    scaled = std::max(scaled, d2[i]);
  }
  const double floor1 = kSpectrumFloor * scale1;
  const double floor2 = kSpectrumFloor * scale2;

  // (i): brute-force scan of the 2-D grid, split into regions.
  double c_low = 0, c_high1 = 0, c_high2 = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x1 = rep.xi[i];
    for (std::size_t k = 0; k < samples; ++k) {
      const double x2 = rep.xi[k];
      const double value = a1[i] * a2[k];
      if (!(value > floor1 * scale2)) continue;
      const double env = detail::envelope(x1, x2, alpha, gamma);
      const double ratio = env > 0 ? value / env : INFINITY;
      if (std::abs(x1) < 1.0) c_low = std::max(c_low, ratio);
      if (std::abs(x1) >= 1.0) c_high1 = std::max(c_high1, ratio);
      if (std::abs(x2) >= 1.0) c_high2 = std::max(c_high2, ratio);
      rep.C1 = std::max(rep.C1, ratio);
    }
  }

  // Exponent near xi1 = 0, where the vanishing moments live.
  const std::vector<double> low = detail::geometric(1e-3, 1e-2, 16);
  std::vector<double> low_v(low.size());
  for (std::size_t i = 0; i < low.size(); ++i) low_v[i] = std::abs(s.psi1_hat(low[i]));
  const double low_exp = detail::loglog_slope(low, low_v, floor1);

  // Tail exponents of the upper envelopes over [F/8, F].
  auto tail_exponent = [&](const std::vector<double>& mag, double floor) {
    std::vector<double> x, y;
    for (std::size_t i = half; i < samples; ++i) x.push_back(rep.xi[i]), y.push_back(mag[i]);
    y = detail::upper_envelope(std::move(y));
    std::vector<double> tx, ty;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] >= freq_extent / 8.0) tx.push_back(x[i]), ty.push_back(y[i]);
    const double slope = detail::loglog_slope(tx, ty, floor);
    return std::isinf(slope) ? INFINITY : -slope;
  };
  const double high1 = tail_exponent(a1, floor1);
  const double high2 = tail_exponent(a2, floor2);

  auto meets = [&](double exponent, double target) { return std::isinf(exponent) || exponent >= target - slack; };
  rep.rows.push_back({"i", "low-xi1", low_exp, c_low, alpha, std::isfinite(c_low) && meets(low_exp, alpha)});
  rep.rows.push_back({"i", "high-xi1", high1, c_high1, gamma, std::isfinite(c_high1) && meets(high1, gamma)});
  rep.rows.push_back({"i", "high-xi2", high2, c_high2, gamma, std::isfinite(c_high2) && meets(high2, gamma)});

  // (ii): h(xi1) = max over xi2 of |psi1_hat(xi1)| |psi2_hat'(xi2)| (1 + |xi2|/|xi1|)^gamma.
  auto h_at = [&](double x1, double a) {
    if (!(a > floor1)) return 0.0;
    double best = 0;
    for (std::size_t k = 0; k < samples; ++k) {
      if (!(d2[k] > kSpectrumFloor * scaled)) continue;
      const double w = x1 > 0 ? std::pow(1.0 + std::abs(rep.xi[k]) / x1, gamma) : INFINITY;
      best = std::max(best, a * d2[k] * w);
    }
    return best;
  };
  rep.h.assign(samples, 0.0);
  for (std::size_t i = 0; i < samples; ++i) rep.h[i] = h_at(std::abs(rep.xi[i]), a1[i]);
  double integral = 0;
  for (std::size_t i = 0; i + 1 < samples; ++i)
    integral += 0.5 * (rep.h[i] + rep.h[i + 1]) * (rep.xi[i + 1] - rep.xi[i]);

  // h integrable: decays faster than 1/|xi1| at infinity and blows up slower than 1/|xi1| at 0.
  const double h_tail = tail_exponent(rep.h, 0.0);
  std::vector<double> h_low(low.size());
  for (std::size_t i = 0; i < low.size(); ++i) h_low[i] = h_at(low[i], low_v[i]);
  const double h_origin = detail::loglog_slope(low, h_low, 0.0);
  const bool finite = std::isfinite(integral);
  rep.rows.push_back({"ii", "h-tail", h_tail, integral, 1.0, finite && (std::isinf(h_tail) || h_tail > 1.0)});
  rep.rows.push_back(
      {"ii", "h-origin", h_origin, integral, -1.0, finite && (std::isinf(h_origin) || h_origin > -1.0)});
  return rep;
}

inline DecayReport verify_decay_conditions(const GeneratorSpec& spec, double freq_extent, std::size_t samples) {
  return verify_decay_conditions(spectrum_of(spec), spec.alpha, spec.gamma, freq_extent, samples);
}

inline void require_decay_conditions(const DecayReport& report) {
  if (!report.pass()) fail(ErrorKind::ConditionViolated, "decay conditions fail in " + report.failed_regions());
}

}  // namespace shearsparse
