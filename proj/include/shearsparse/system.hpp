#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "shearsparse/error.hpp"
#include "shearsparse/generator.hpp"
#include "shearsparse/grid.hpp"

namespace shearsparse {

enum class Cone : std::uint8_t { coarse = 0, horizontal = 1, vertical = 2 };

constexpr const char* to_string(Cone c) {
  switch (c) {
    case Cone::coarse: return "coarse";
    case Cone::horizontal: return "horizontal";
    case Cone::vertical: return "vertical";
  }
  return "?";
}

struct Mat2 {
  double a11 = 1, a12 = 0, a21 = 0, a22 = 1;

  Point operator()(Point x) const { return {a11 * x.x1 + a12 * x.x2, a21 * x.x1 + a22 * x.x2}; }
  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

// A_{2^j} for the horizontal cone, A~_{2^j} for the vertical one.
inline Mat2 parabolic_matrix(int j, Cone cone) {
  if (j < 0) fail(ErrorKind::InvalidArgument, "scale must be non-negative");
  const double fine = std::ldexp(1.0, j);
  const double coarse = std::exp2(0.5 * j);
  switch (cone) {
    case Cone::horizontal: return {fine, 0, 0, coarse};
    case Cone::vertical: return {coarse, 0, 0, fine};
    case Cone::coarse: return {};
  }
  return {};
}

// S_k for the horizontal cone, S_k^T for the vertical one.
inline Mat2 shear_matrix(int k, Cone cone) {
  switch (cone) {
    case Cone::horizontal: return {1, static_cast<double>(k), 0, 1};
    case Cone::vertical: return {1, 0, static_cast<double>(k), 1};
    case Cone::coarse: return {};
  }
  return {};
}

inline int shear_bound(int j) { return static_cast<int>(std::ceil(std::exp2(0.5 * j) - 1e-12)); }

struct ShearletIndex {
  Cone cone = Cone::coarse;
  int j = 0;
  int k = 0;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;

  friend auto operator<=>(const ShearletIndex&, const ShearletIndex&) = default;
};

struct Box {
  double lo1, hi1, lo2, hi2;
};

// Preimage of [0,L]^2 + c m under x -> M x, i.e. M^{-1}([0,L]^2 + c m).
struct Parallelogram {
  Mat2 forward;  // M
  Point shift;   // c m
  double side;   // L

  bool contains_interior(Point x) const {
    const Point y = forward(x) - shift;
    return y.x1 > 0 && y.x1 < side && y.x2 > 0 && y.x2 < side;
  }
  std::array<Point, 4> corners() const {
    const Mat2 inv = forward.inverse();
    return {inv(shift), inv(shift + Point{side, 0}), inv(shift + Point{side, side}), inv(shift + Point{0, side})};
  }
  Box bounding_box() const {
    const auto c = corners();
    Box b{c[0].x1, c[0].x1, c[0].x2, c[0].x2};
    for (const Point& p : c) {
      b.lo1 = std::min(b.lo1, p.x1);
      b.hi1 = std::max(b.hi1, p.x1);
      b.lo2 = std::min(b.lo2, p.x2);
      b.hi2 = std::max(b.hi2, p.x2);
    }
    return b;
  }
};

// One (cone, j, k) family. Atoms read F(a_f x_f + s x_c - c m_f) G(a_c x_c - c m_c) * norm
// with x_f the "fine" coordinate (x1 horizontal, x2 vertical) and x_c the other one;
// F is psi1 (psi2 for the coarse part) and G is psi2.
struct Slab {
  Cone cone = Cone::coarse;
  int j = 0;
  int k = 0;
  double fine_scale = 1;    // a_f
  double coarse_scale = 1;  // a_c
  double shear = 0;         // s = k 2^{j/2}
  double normalization = 1;

  std::int64_t mc_lo = 0, mc_hi = -1;
  std::vector<std::pair<std::int64_t, std::int64_t>> mf_ranges;  // per m_c, inclusive, may be empty
  std::int64_t mf_min = 0, mf_max = -1;

  std::size_t offset = 0;  // into the dense coefficient storage
  std::size_t valid = 0;

  // Index-order rectangle: m1 major, m2 minor.
  std::int64_t m1_lo() const { return cone == Cone::vertical ? mc_lo : mf_min; }
  std::int64_t m1_hi() const { return cone == Cone::vertical ? mc_hi : mf_max; }
  std::int64_t m2_lo() const { return cone == Cone::vertical ? mf_min : mc_lo; }
  std::int64_t m2_hi() const { return cone == Cone::vertical ? mf_max : mc_hi; }
  std::size_t m1_count() const { return static_cast<std::size_t>(m1_hi() - m1_lo() + 1); }
  std::size_t m2_count() const { return static_cast<std::size_t>(m2_hi() - m2_lo() + 1); }
  std::size_t dense_size() const { return mc_hi < mc_lo ? 0 : m1_count() * m2_count(); }

  std::size_t position(std::int64_t mf, std::int64_t mc) const {
    const std::int64_t m1 = cone == Cone::vertical ? mc : mf;
    const std::int64_t m2 = cone == Cone::vertical ? mf : mc;
    return offset + static_cast<std::size_t>(m1 - m1_lo()) * m2_count() + static_cast<std::size_t>(m2 - m2_lo());
  }
  bool is_valid(std::int64_t mf, std::int64_t mc) const {
    if (mc < mc_lo || mc > mc_hi) return false;
    const auto& r = mf_ranges[static_cast<std::size_t>(mc - mc_lo)];
    return mf >= r.first && mf <= r.second;
  }
  std::pair<std::int64_t, std::int64_t> fine_coarse(std::int64_t m1, std::int64_t m2) const {
    return cone == Cone::vertical ? std::pair{m2, m1} : std::pair{m1, m2};
  }
};

struct SystemConfig {
  double c = 1.0;
  int J = 4;
  std::size_t atom_resolution = 0;  // 0 selects 2^{J+4}
};

// Cone-adapted discrete shearlet system restricted to atoms meeting (0,1)^2.
class ShearletSystem {
 public:
  ShearletSystem(std::shared_ptr<const GeneratorSpec> spec, SystemConfig config)
      : spec_(std::move(spec)), config_(config) {
    if (!spec_) fail(ErrorKind::InvalidArgument, "missing generator spec");
    if (config_.J < 0) fail(ErrorKind::InvalidArgument, "J must be non-negative");
    if (!(config_.c > 0)) fail(ErrorKind::InvalidArgument, "sampling constant must be positive");
    if (config_.atom_resolution == 0) config_.atom_resolution = std::size_t{1} << (config_.J + 4);
    if (!is_power_of_two(config_.atom_resolution) || config_.atom_resolution < (std::size_t{1} << config_.J))
      fail(ErrorKind::InvalidArgument, "atom_resolution must be a power of two >= 2^J");
    build_slabs();
  }

  const GeneratorSpec& spec() const noexcept { return *spec_; }
  std::shared_ptr<const GeneratorSpec> spec_ptr() const noexcept { return spec_; }
  const SystemConfig& config() const noexcept { return config_; }
  double c() const noexcept { return config_.c; }
  int J() const noexcept { return config_.J; }
  double support() const noexcept { return spec_->support(); }
  const std::vector<Slab>& slabs() const noexcept { return slabs_; }
  std::size_t dense_size() const noexcept { return dense_size_; }
  std::size_t index_count() const noexcept { return index_count_; }
  // Dense storage positions of the enumerated indices, in lexicographic index order.
  const std::vector<std::size_t>& positions() const noexcept { return positions_; }

  // Smallest image size that gives the finest atoms 8 samples per generator unit.
  std::size_t min_grid_size() const { return std::size_t{8} << config_.J; }

  const Slab* find_slab(Cone cone, int j, int k) const {
    for (const Slab& s : slabs_)
      if (s.cone == cone && s.j == j && s.k == k) return &s;
    return nullptr;
  }

  Mat2 transform(const ShearletIndex& idx) const {
    switch (idx.cone) {
      case Cone::coarse: return {};
      case Cone::horizontal: return shear_matrix(idx.k, Cone::horizontal) * parabolic_matrix(idx.j, Cone::horizontal);
      case Cone::vertical: return shear_matrix(idx.k, Cone::vertical) * parabolic_matrix(idx.j, Cone::vertical);
    }
    return {};
  }

  double normalization(const ShearletIndex& idx) const {
    return idx.cone == Cone::coarse ? 1.0 : std::exp2(0.75 * idx.j);
  }

  Parallelogram support_of(const ShearletIndex& idx) const {
    return {transform(idx), config_.c * Point{static_cast<double>(idx.m1), static_cast<double>(idx.m2)}, support()};
  }

  // Generator value at y (already mapped into generator coordinates).
  double generator(Cone cone, Point y) const {
    switch (cone) {
      case Cone::coarse: return spec_->phi(y.x1, y.x2);
      case Cone::horizontal: return spec_->psi(y.x1, y.x2);
      case Cone::vertical: return spec_->psi_tilde(y.x1, y.x2);
    }
    return 0.0;
  }

  // Pointwise value of the atom; exactly zero outside its support.
  double atom_value(const ShearletIndex& idx, Point x) const {
    const Point y = transform(idx)(x) - config_.c * Point{static_cast<double>(idx.m1), static_cast<double>(idx.m2)};
    return normalization(idx) * generator(idx.cone, y);
  }

  bool is_enumerated(const ShearletIndex& idx) const {
    const Slab* s = find_slab(idx.cone, idx.j, idx.k);
    if (!s) return false;
    const auto [mf, mc] = s->fine_coarse(idx.m1, idx.m2);
    return s->is_valid(mf, mc);
  }

  template <class Fn>
  void for_each_index(Fn&& fn) const {
    for (const Slab& s : slabs_) for_each_index(s, fn);
  }

  template <class Fn>
  void for_each_index(const Slab& s, Fn&& fn) const {
    for (std::int64_t m1 = s.m1_lo(); m1 <= s.m1_hi(); ++m1)
      for (std::int64_t m2 = s.m2_lo(); m2 <= s.m2_hi(); ++m2) {
        const auto [mf, mc] = s.fine_coarse(m1, m2);
        if (s.is_valid(mf, mc)) fn(ShearletIndex{s.cone, s.j, s.k, m1, m2}, s.position(mf, mc));
      }
  }

 private:
  void build_slabs() {
    const double L = support();
    const double c = config_.c;
    auto add = [&](Cone cone, int j, int k) {
      Slab s;
      s.cone = cone;
      s.j = j;
      s.k = k;
      if (cone == Cone::coarse) {
        s.fine_scale = s.coarse_scale = 1.0;
      } else {
        s.fine_scale = std::ldexp(1.0, j);
        s.coarse_scale = std::exp2(0.5 * j);
        s.shear = k * s.coarse_scale;
        s.normalization = std::exp2(0.75 * j);
      }
      // Coarse direction: (c m_c, c m_c + L) / a_c meets (0,1).
      s.mc_lo = static_cast<std::int64_t>(std::floor(-L / c)) + 1;
      s.mc_hi = static_cast<std::int64_t>(std::ceil(s.coarse_scale / c)) - 1;
      s.mf_min = INT64_MAX;
      s.mf_max = INT64_MIN;
      for (std::int64_t mc = s.mc_lo; mc <= s.mc_hi; ++mc) {
        const double lo = std::max(0.0, c * static_cast<double>(mc) / s.coarse_scale);
        const double hi = std::min(1.0, (c * static_cast<double>(mc) + L) / s.coarse_scale);
        std::pair<std::int64_t, std::int64_t> range{0, -1};
        if (lo < hi) {
          const double u_lo = std::min(s.shear * lo, s.shear * hi);
          const double u_hi = s.fine_scale + std::max(s.shear * lo, s.shear * hi);
          range.first = static_cast<std::int64_t>(std::floor((u_lo - L) / c)) + 1;
          range.second = static_cast<std::int64_t>(std::ceil(u_hi / c)) - 1;
        }
        s.mf_ranges.push_back(range);
        if (range.first <= range.second) {
          s.mf_min = std::min(s.mf_min, range.first);
          s.mf_max = std::max(s.mf_max, range.second);
          s.valid += static_cast<std::size_t>(range.second - range.first + 1);
        }
      }
      s.offset = dense_size_;
      dense_size_ += s.dense_size();
      index_count_ += s.valid;
      slabs_.push_back(std::move(s));
    };

    add(Cone::coarse, 0, 0);
    for (Cone cone : {Cone::horizontal, Cone::vertical})
      for (int j = 0; j <= config_.J; ++j) {
        const int kmax = shear_bound(j);
        for (int k = -kmax; k <= kmax; ++k) add(cone, j, k);
      }
    positions_.reserve(index_count_);
    for_each_index([&](const ShearletIndex&, std::size_t pos) { positions_.push_back(pos); });
  }

  std::shared_ptr<const GeneratorSpec> spec_;
  SystemConfig config_;
  std::vector<Slab> slabs_;
  std::size_t dense_size_ = 0;
  std::size_t index_count_ = 0;
  std::vector<std::size_t> positions_;
};

// All indices in lexicographic (cone, j, k, m1, m2) order.
inline std::vector<ShearletIndex> enumerate_indices(const ShearletSystem& system) {
  std::vector<ShearletIndex> out;
  out.reserve(system.index_count());
  system.for_each_index([&](const ShearletIndex& idx, std::size_t) { out.push_back(idx); });
  return out;
}

// Transported tabulation of one atom: the generator sampled on the dyadic
// y-grid of spacing delta, carried to x = M^{-1}(y + c m). Cell area delta^2 / |det M|.
struct AtomTabulation {
  ShearletIndex index;
  Mat2 forward;
  Point shift;
  double normalization = 1;
  double delta = 1;
  std::size_t side = 0;        // samples per generator axis
  std::vector<double> values;  // row-major over y2, already normalized
  Parallelogram support;
  Box bounding_box;

  Point node(std::size_t i1, std::size_t i2) const {
    return forward.inverse()(Point{delta * static_cast<double>(i1), delta * static_cast<double>(i2)} + shift);
  }
  double cell_area() const { return delta * delta / std::abs(forward.det()); }
  double norm_l2() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s * cell_area());
  }
};

inline AtomTabulation atom(const ShearletSystem& system, const ShearletIndex& idx) {
  if (!system.is_enumerated(idx)) fail(ErrorKind::InvalidArgument, "index is not enumerated by this system");
  const int depth = log2_exact(system.config().atom_resolution) - system.J();
  const GeneratorSpec& spec = system.spec();
  if (depth > spec.psi1.depth()) fail(ErrorKind::InvalidArgument, "atom_resolution exceeds the generator tabulation depth");

  AtomTabulation t;
  t.index = idx;
  t.forward = system.transform(idx);
  t.shift = system.c() * Point{static_cast<double>(idx.m1), static_cast<double>(idx.m2)};
  t.normalization = system.normalization(idx);
  t.delta = std::ldexp(1.0, -depth);
  t.support = system.support_of(idx);
  t.bounding_box = t.support.bounding_box();

  const Tabulated1D f1 = (idx.cone == Cone::coarse ? spec.psi2 : spec.psi1).coarsened(depth);
  const Tabulated1D f2 = spec.psi2.coarsened(depth);
  const auto v1 = f1.values();
  const auto v2 = f2.values();
  t.side = v1.size();
  t.values.resize(t.side * t.side);
  for (std::size_t i2 = 0; i2 < t.side; ++i2)
    for (std::size_t i1 = 0; i1 < t.side; ++i1) {
      // psi~(y) = psi1(y2) psi2(y1)
      const double g = idx.cone == Cone::vertical ? v1[i2] * v2[i1] : v1[i1] * v2[i2];
      t.values[i2 * t.side + i1] = t.normalization * g;
    }
  return t;
}

}  // namespace shearsparse
