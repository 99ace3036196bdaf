#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "shearsparse/error.hpp"

namespace shearsparse {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Point operator-(Point a, Point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Point operator*(double s, Point a) { return {s * a.x1, s * a.x2}; }
  friend bool operator==(Point, Point) = default;
};

inline double norm(Point p) { return std::hypot(p.x1, p.x2); }

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

constexpr int log2_exact(std::size_t n) {
  int l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

// n x n samples of a function on [0,1]^2. Pixel (row b, column a) covers
// [a/n,(a+1)/n] x [b/n,(b+1)/n]; rows follow x2, columns follow x1.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double pixel() const noexcept { return 1.0 / static_cast<double>(n_); }
  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) / static_cast<double>(n_); }

  double& operator()(std::size_t row, std::size_t col) noexcept {
    assert(row < n_ && col < n_);
    return data_[row * n_ + col];
  }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    assert(row < n_ && col < n_);
    return data_[row * n_ + col];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> row(std::size_t b) noexcept { return {data_.data() + b * n_, n_}; }
  std::span<const double> row(std::size_t b) const noexcept { return {data_.data() + b * n_, n_}; }

  Grid transposed() const {
    Grid t(n_);
    for (std::size_t b = 0; b < n_; ++b)
      for (std::size_t a = 0; a < n_; ++a) t.data_[a * n_ + b] = data_[b * n_ + a];
    return t;
  }

  Grid& operator+=(const Grid& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Grid& operator-=(const Grid& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Grid& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  friend Grid operator+(Grid a, const Grid& b) { return a += b; }
  friend Grid operator-(Grid a, const Grid& b) { return a -= b; }
  friend Grid operator*(double s, Grid a) { return a *= s; }

  // y += s * x
  void axpy(double s, const Grid& x) {
    check_same(x);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * x.data_[i];
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  void check_same(const Grid& o) const {
    if (o.n_ != n_) fail(ErrorKind::InvalidArgument, "grid size mismatch");
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

// L2([0,1]^2) inner product of two grids read as piecewise-constant functions.
inline double inner(const Grid& a, const Grid& b) {
  if (a.size() != b.size()) fail(ErrorKind::InvalidArgument, "grid size mismatch");
  const auto va = a.values();
  const auto vb = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
  return s * a.pixel() * a.pixel();
}

inline double norm_sq(const Grid& a) { return inner(a, a); }
inline double norm(const Grid& a) { return std::sqrt(norm_sq(a)); }

}  // namespace shearsparse
