#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "shearsparse/error.hpp"
#include "shearsparse/grid.hpp"
#include "shearsparse/parallel.hpp"

namespace shearsparse {

inline constexpr std::size_t kThetaSamples = 4096;
inline constexpr std::size_t kPlaneSamples = 128;

// rho(theta) = base_radius + sum_m a_m cos(m theta) + b_m sin(m theta), m = 1, 2, ...
class RadiusProfile {
 public:
  struct Harmonic {
    double cos = 0;
    double sin = 0;
  };

  RadiusProfile() = default;

  double base_radius() const noexcept { return base_radius_; }
  Point translate() const noexcept { return translate_; }
  double nu() const noexcept { return nu_; }
  double rho0() const noexcept { return rho0_; }
  const std::vector<Harmonic>& harmonics() const noexcept { return harmonics_; }

  double rho(double theta) const { return eval(theta, 0); }
  double rho_prime(double theta) const { return eval(theta, 1); }
  double rho_second(double theta) const { return eval(theta, 2); }

  // Largest |rho''| over the uniform theta grid used for validation.
  double sampled_curvature_bound() const {
    double m = 0.0;
    for (std::size_t i = 0; i < kThetaSamples; ++i) m = std::max(m, std::abs(rho_second(sample_theta(i))));
    return m;
  }

  static double sample_theta(std::size_t i) {
    return 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(kThetaSamples);
  }

  friend RadiusProfile make_radius_profile(std::vector<Harmonic>, double, Point, double, double);

 private:
  double eval(double theta, int derivative) const {
    double s = derivative == 0 ? base_radius_ : 0.0;
    for (std::size_t i = 0; i < harmonics_.size(); ++i) {
      const double m = static_cast<double>(i + 1);
      const double c = std::cos(m * theta);
      const double sn = std::sin(m * theta);
      const Harmonic& h = harmonics_[i];
      switch (derivative) {
        case 0: s += h.cos * c + h.sin * sn; break;
        case 1: s += m * (-h.cos * sn + h.sin * c); break;
        default: s += -m * m * (h.cos * c + h.sin * sn); break;
      }
    }
    return s;
  }

  std::vector<Harmonic> harmonics_;
  double base_radius_ = 0.25;
  Point translate_{0.5, 0.5};
  double nu_ = 1.0;
  double rho0_ = 0.45;
};

inline RadiusProfile make_radius_profile(std::vector<RadiusProfile::Harmonic> harmonics, double base_radius,
                                         Point translate, double nu, double rho0 = 0.45) {
  if (!(base_radius > 0.0 && base_radius < 1.0)) fail(ErrorKind::InvalidArgument, "base_radius must lie in (0,1)");
  if (!(nu > 0.0)) fail(ErrorKind::InvalidArgument, "nu must be positive");
  if (!(rho0 > 0.0 && rho0 < 1.0)) fail(ErrorKind::InvalidArgument, "rho0 must lie in (0,1)");
  RadiusProfile p;
  p.harmonics_ = std::move(harmonics);
  p.base_radius_ = base_radius;
  p.translate_ = translate;
  p.nu_ = nu;
  p.rho0_ = rho0;

  const double curvature = p.sampled_curvature_bound();
  if (curvature > nu)
    fail(ErrorKind::CurvatureExceeded,
         "sampled sup|rho''| = " + std::to_string(curvature) + " exceeds nu = " + std::to_string(nu));
  double rmax = 0.0;
  for (std::size_t i = 0; i < kThetaSamples; ++i) {
    const double t = RadiusProfile::sample_theta(i);
    const double r = p.rho(t);
    if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "radius profile is not positive at theta = " + std::to_string(t));
    const Point x = translate + r * Point{std::cos(t), std::sin(t)};
    if (x.x1 < 0.0 || x.x1 > 1.0 || x.x2 < 0.0 || x.x2 > 1.0)
      fail(ErrorKind::OutOfUnitSquare, "boundary leaves the unit square at theta = " + std::to_string(t));
    rmax = std::max(rmax, r);
  }
  if (rmax > rho0)
    fail(ErrorKind::InvalidArgument, "radius " + std::to_string(rmax) + " exceeds rho0 = " + std::to_string(rho0));
  return p;
}

inline Point boundary_point(const RadiusProfile& p, double theta) {
  return p.translate() + p.rho(theta) * Point{std::cos(theta), std::sin(theta)};
}

// d beta / d theta
inline Point boundary_velocity(const RadiusProfile& p, double theta) {
  const double r = p.rho(theta);
  const double dr = p.rho_prime(theta);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {dr * c - r * s, dr * s + r * c};
}

// Boundary points are inside; the relative slack only absorbs rounding in
// the polar round trip.
inline bool contains(const RadiusProfile& p, Point x) {
  const Point d = x - p.translate();
  const double r = norm(d);
  if (r == 0.0) return true;
  return r <= p.rho(std::atan2(d.x2, d.x1)) * (1.0 + 1e-12);
}

// s = dx1/dx2 along the curve; +infinity where the tangent is horizontal.
inline double tangent_slope(const RadiusProfile& p, double theta) {
  const Point v = boundary_velocity(p, theta);
  const double speed = norm(v);
  if (!(speed > 0.0)) fail(ErrorKind::DegenerateTangent, "boundary velocity vanishes at theta = " + std::to_string(theta));
  if (std::abs(v.x2) <= 1e-12 * speed) return std::numeric_limits<double>::infinity();
  return v.x1 / v.x2;
}

// Value and derivatives up to order two at one point.
struct Jet {
  double f = 0, d1 = 0, d2 = 0, d11 = 0, d12 = 0, d22 = 0;

  Jet& operator+=(const Jet& o) {
    f += o.f;
    d1 += o.d1;
    d2 += o.d2;
    d11 += o.d11;
    d12 += o.d12;
    d22 += o.d22;
    return *this;
  }
};

// C^2 function on [0,1]^2 with closed-form derivatives. A polynomial in graded
// order (1, x1, x2, x1^2, x1 x2, x2^2, ...), or a sum of compactly supported
// C-infinity bumps w * e * exp(-1/(1-q)), q = |x-center|^2 / r^2 < 1.
class SmoothPatch {
 public:
  enum class Kind { polynomial, bump_sum };

  struct Bump {
    double weight = 0;
    Point center;
    double radius = 1;
  };

  static SmoothPatch polynomial(std::vector<double> coeffs) {
    SmoothPatch s;
    s.kind_ = Kind::polynomial;
    s.coeffs_ = std::move(coeffs);
    s.validate();
    return s;
  }

  static SmoothPatch bump_sum(std::vector<Bump> bumps) {
    for (const Bump& b : bumps)
      if (!(b.radius > 0.0)) fail(ErrorKind::InvalidArgument, "bump radius must be positive");
    SmoothPatch s;
    s.kind_ = Kind::bump_sum;
    s.bumps_ = std::move(bumps);
    s.validate();
    return s;
  }

  static SmoothPatch zero() { return polynomial({}); }
  static SmoothPatch constant(double v) { return polynomial({v}); }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  const std::vector<Bump>& bumps() const noexcept { return bumps_; }

  bool is_zero() const {
    if (kind_ == Kind::polynomial) return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
    return std::all_of(bumps_.begin(), bumps_.end(), [](const Bump& b) { return b.weight == 0.0; });
  }

  double operator()(Point x) const { return kind_ == Kind::polynomial ? poly_value(x) : jet(x).f; }

  Jet jet(Point x) const {
    Jet out;
    if (kind_ == Kind::polynomial) {
      std::size_t i = 0;
      for (int d = 0; i < coeffs_.size(); ++d)
        for (int q = 0; q <= d && i < coeffs_.size(); ++q, ++i) out += monomial(coeffs_[i], d - q, q, x);
      return out;
    }
    for (const Bump& b : bumps_) out += bump(b, x);
    return out;
  }

  // sum over |alpha| <= 2 of sup |D^alpha f|, sampled on a 128 x 128 grid of cell centers.
  double sampled_c2_norm() const {
    std::array<double, 6> sup{};
    for (std::size_t b = 0; b < kPlaneSamples; ++b)
      for (std::size_t a = 0; a < kPlaneSamples; ++a) {
        const double h = 1.0 / static_cast<double>(kPlaneSamples);
        const Jet j = jet({(static_cast<double>(a) + 0.5) * h, (static_cast<double>(b) + 0.5) * h});
        const double v[6] = {j.f, j.d1, j.d2, j.d11, j.d12, j.d22};
        for (int i = 0; i < 6; ++i) sup[i] = std::max(sup[i], std::abs(v[i]));
      }
    double s = 0.0;
    for (double v : sup) s += v;
    return s;
  }

  // The same patch multiplied by s, revalidated.
  SmoothPatch scaled(double s) const {
    SmoothPatch out = *this;
    for (double& c : out.coeffs_) c *= s;
    for (Bump& b : out.bumps_) b.weight *= s;
    out.validate();
    return out;
  }

 private:
  void validate() const {
    const double c2 = sampled_c2_norm();
    if (c2 > 1.0 + 1e-12) fail(ErrorKind::C2NormExceeded, "sampled C^2 norm " + std::to_string(c2) + " exceeds 1");
  }

  double poly_value(Point x) const {
    double s = 0.0;
    std::size_t i = 0;
    for (int d = 0; i < coeffs_.size(); ++d)
      for (int q = 0; q <= d && i < coeffs_.size(); ++q, ++i)
        s += coeffs_[i] * std::pow(x.x1, d - q) * std::pow(x.x2, q);
    return s;
  }

  static Jet monomial(double c, int p, int q, Point x) {
    auto pw = [](double v, int e) { return e < 0 ? 0.0 : std::pow(v, e); };
    Jet j;
    j.f = c * pw(x.x1, p) * pw(x.x2, q);
    j.d1 = c * p * pw(x.x1, p - 1) * pw(x.x2, q);
    j.d2 = c * q * pw(x.x1, p) * pw(x.x2, q - 1);
    j.d11 = c * p * (p - 1) * pw(x.x1, p - 2) * pw(x.x2, q);
    j.d12 = c * p * q * pw(x.x1, p - 1) * pw(x.x2, q - 1);
    j.d22 = c * q * (q - 1) * pw(x.x1, p) * pw(x.x2, q - 2);
    return j;
  }

  // g(q) = e * exp(-1/(1-q)); f = w g(q(x)) with q = |u|^2 / r^2, u = x - center.
  static Jet bump(const Bump& b, Point x) {
    const Point u = x - b.center;
    const double r2 = b.radius * b.radius;
    const double q = (u.x1 * u.x1 + u.x2 * u.x2) / r2;
    if (q >= 1.0) return {};
    const double t = 1.0 / (1.0 - q);
    const double g = b.weight * std::exp(1.0 - t);
    const double g1 = -g * t * t;                             // dg/dq
    const double g2 = g * t * t * t * t * (1.0 - 2.0 * (1.0 - q));  // d2g/dq2
    const double q1 = 2.0 * u.x1 / r2, q2 = 2.0 * u.x2 / r2;
    Jet j;
    j.f = g;
    j.d1 = g1 * q1;
    j.d2 = g1 * q2;
    j.d11 = g2 * q1 * q1 + g1 * 2.0 / r2;
    j.d12 = g2 * q1 * q2;
    j.d22 = g2 * q2 * q2 + g1 * 2.0 / r2;
    return j;
  }

  Kind kind_ = Kind::polynomial;
  std::vector<double> coeffs_;
  std::vector<Bump> bumps_;
};

// f = f0 + f1 chi_B
struct CartoonImage {
  SmoothPatch smooth_part = SmoothPatch::zero();
  SmoothPatch jump_part = SmoothPatch::zero();
  RadiusProfile boundary;
  bool has_boundary = true;

  double operator()(Point x) const {
    double v = smooth_part(x);
    if (has_boundary && contains(boundary, x)) v += jump_part(x);
    return v;
  }
};

inline double evaluate(const CartoonImage& f, Point x) { return f(x); }

// Each pixel is the mean of oversample^2 point values on a uniform sub-grid.
template <class F>
Grid rasterize(const F& f, std::size_t n, std::size_t oversample = 8, unsigned workers = 1) {
  if (!is_power_of_two(n)) fail(ErrorKind::InvalidArgument, "grid size must be a power of two");
  if (oversample < 1) fail(ErrorKind::InvalidArgument, "oversample must be at least 1");
  Grid g(n);
  const double nd = static_cast<double>(n);
  const double od = static_cast<double>(oversample);
  parallel_for(n, workers, [&](std::size_t b) {
    for (std::size_t a = 0; a < n; ++a) {
      double s = 0.0;
      for (std::size_t v = 0; v < oversample; ++v)
        for (std::size_t u = 0; u < oversample; ++u)
          s += f(Point{(static_cast<double>(a) + (static_cast<double>(u) + 0.5) / od) / nd,
                       (static_cast<double>(b) + (static_cast<double>(v) + 0.5) / od) / nd});
      g(b, a) = s / (od * od);
    }
  });
  return g;
}

}  // namespace shearsparse
