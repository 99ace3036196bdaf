#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "shearsparse/cascade.hpp"
#include "shearsparse/error.hpp"
#include "shearsparse/filters.hpp"

namespace shearsparse {

struct FilterChoice {
  std::string family = "daubechies";
  int order = 3;   // vanishing moments of the wavelet
  int depth = 12;  // cascade refinement depth (2^depth samples per unit)
};

// Separable generators psi = psi1 (x) psi2, psi~ = psi2 (x) psi1, phi = psi2 (x) psi2,
// where psi1 is the wavelet and psi2 the scaling function of one refinement filter.
// alpha and gamma are the decay exponents the Fourier-side check is run against.
struct GeneratorSpec {
  FilterChoice filter;
  std::vector<double> lowpass;
  Tabulated1D psi1;
  Tabulated1D psi2;
  double alpha = 5.5;
  double gamma = 4.0;

  double support() const noexcept { return psi1.end(); }

  double psi(double x1, double x2) const { return psi1(x1) * psi2(x2); }
  double psi_tilde(double x1, double x2) const { return psi1(x2) * psi2(x1); }
  double phi(double x1, double x2) const { return psi2(x1) * psi2(x2); }

  double psi_norm_l2() const { return std::sqrt(psi1.norm_l2_sq() * psi2.norm_l2_sq()); }
  double psi_norm_l1() const { return psi1.norm_l1() * psi2.norm_l1(); }
};

inline constexpr double kMomentTolerance = 1e-8;

// Number of leading moments of psi1 that vanish to kMomentTolerance * ||psi1||_1.
inline int vanishing_moments(const Tabulated1D& wavelet, int max_check = 8) {
  const double scale = wavelet.norm_l1();
  int count = 0;
  while (count < max_check && std::abs(wavelet.moment(count)) <= kMomentTolerance * scale) ++count;
  return count;
}

inline GeneratorSpec build_generators(const FilterChoice& choice, double alpha = 5.5, double gamma = 4.0) {
  if (choice.family != "daubechies" && choice.family != "haar")
    fail(ErrorKind::InvalidArgument, "unknown filter family '" + choice.family + "'");
  if (!(alpha > 0.0) || !(gamma > 0.0)) fail(ErrorKind::InvalidArgument, "alpha and gamma must be positive");
  const int order = choice.family == "haar" ? 1 : choice.order;

  GeneratorSpec spec;
  spec.filter = choice;
  spec.filter.order = order;
  spec.lowpass = daubechies_lowpass(order);
  auto pair = cascade(spec.lowpass, choice.depth);
  spec.psi1 = std::move(pair.wavelet);
  spec.psi2 = std::move(pair.scaling);
  spec.alpha = alpha;
  spec.gamma = gamma;

  const int moments = vanishing_moments(spec.psi1);
  if (moments < 2)
    fail(ErrorKind::InsufficientMoments,
         "wavelet has " + std::to_string(moments) + " vanishing moment(s); at least 2 are required");
  return spec;
}

}  // namespace shearsparse
