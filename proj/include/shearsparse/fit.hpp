#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shearsparse/error.hpp"

namespace shearsparse {

enum class RateModel { pure_power, power_with_log };

constexpr const char* to_string(RateModel m) { return m == RateModel::pure_power ? "pure-power" : "power-with-log"; }

// e(N) ~ C N^{-beta} (log N)^{log_exponent}
struct RateReport {
  RateModel model = RateModel::pure_power;
  double beta = 0;
  double log_exponent = 0;
  bool log_exponent_fixed = true;
  double log_constant = 0;  // log C
  double residual = 0;      // RMS of the log-domain fit
  double fit_min = 0;
  double fit_max = 0;
  std::size_t points = 0;
};

// Least squares in the log domain over the points with x in [lo, hi].
// With model power_with_log the log-log exponent is fitted unless fixed_log_exponent is set.
inline RateReport fit_rate(const std::vector<double>& x, const std::vector<double>& e, RateModel model,
                           std::optional<double> fixed_log_exponent = std::nullopt, double lo = 0.0,
                           double hi = INFINITY) {
  if (x.size() != e.size()) fail(ErrorKind::InvalidArgument, "fit_rate: size mismatch");
  std::vector<double> lx, le, lle;
  double fmin = INFINITY, fmax = -INFINITY;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    if (!(e[i] > 0.0)) fail(ErrorKind::DegenerateFit, "non-positive value at x = " + std::to_string(x[i]));
    if (!(x[i] > 1.0)) fail(ErrorKind::DegenerateFit, "abscissa must exceed 1 for a log fit");
    lx.push_back(std::log(x[i]));
    le.push_back(std::log(e[i]));
    lle.push_back(std::log(std::log(x[i])));
    fmin = std::min(fmin, x[i]);
    fmax = std::max(fmax, x[i]);
  }
  if (lx.size() < 5) fail(ErrorKind::DegenerateFit, "need at least 5 points, have " + std::to_string(lx.size()));
  bool all_equal = true;
  for (double v : le) all_equal = all_equal && v == le.front();
  if (all_equal) fail(ErrorKind::DegenerateFit, "all values are equal");

  const bool free_log = model == RateModel::power_with_log && !fixed_log_exponent;
  const double gamma = model == RateModel::power_with_log && fixed_log_exponent ? *fixed_log_exponent : 0.0;
  const Eigen::Index rows = static_cast<Eigen::Index>(lx.size());
  Eigen::MatrixXd a(rows, free_log ? 3 : 2);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = -lx[i];
    if (free_log) a(i, 2) = lle[i];
    b(i) = le[i] - gamma * lle[i];
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
  RateReport r;
  r.model = model;
  r.log_constant = sol(0);
  r.beta = sol(1);
  r.log_exponent = free_log ? sol(2) : gamma;
  r.log_exponent_fixed = !free_log;
  r.residual = std::sqrt((a * sol - b).squaredNorm() / static_cast<double>(rows));
  r.fit_min = fmin;
  r.fit_max = fmax;
  r.points = lx.size();
  return r;
}

}  // namespace shearsparse
