#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shearsparse/error.hpp"
#include "shearsparse/grid.hpp"
#include "shearsparse/transform.hpp"

namespace shearsparse {

// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoError, "short write to " + path.string());
}

namespace detail {

class ByteWriter {
 public:
  template <class T>
  void put(T v) {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    const U u = std::bit_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
  }
  void raw(std::string_view s) { out_.append(s); }
  const std::string& bytes() const { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}

  template <class T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    need(sizeof(T));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i));
    pos_ += sizeof(T);
    return std::bit_cast<T>(u);
  }
  std::string_view raw(std::size_t n) {
    need(n);
    const auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(ErrorKind::ParseError, what_ + ": truncated");
  }
  std::string_view data_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// "SHSPGRID", u64 n, then n*n f64 values row by row (rows follow x2).
inline std::string encode_grid_raw(const Grid& g) {
  detail::ByteWriter w;
  w.raw("SHSPGRID");
  w.put<std::uint64_t>(g.size());
  for (double v : g.values()) w.put(v);
  return w.bytes();
}

inline Grid decode_grid_raw(std::string_view bytes) {
  detail::ByteReader r(bytes, "grid");
  if (r.raw(8) != "SHSPGRID") fail(ErrorKind::ParseError, "grid: bad magic");
  const auto n = r.get<std::uint64_t>();
  if (n == 0 || n > (1u << 15)) fail(ErrorKind::ParseError, "grid: implausible size");
  Grid g(n);
  for (double& v : g.values()) v = r.get<double>();
  if (!r.done()) fail(ErrorKind::ParseError, "grid: trailing bytes");
  return g;
}

// 16-bit binary PGM of values mapped linearly from [lo, hi]; row 0 of the
// file is the top of the image (largest x2).
inline std::string encode_pgm16(const Grid& g, double lo, double hi) {
  const std::size_t n = g.size();
  std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n65535\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t b = n; b-- > 0;)
    for (std::size_t a = 0; a < n; ++a) {
      const double t = std::clamp((g(b, a) - lo) / span, 0.0, 1.0);
      const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
      out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    }
  return out;
}

inline std::string encode_pgm16(const Grid& g) {
  const auto v = g.values();
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  return encode_pgm16(g, v.empty() ? 0.0 : *mn, v.empty() ? 1.0 : *mx);
}

struct CoefficientDumpSlab {
  std::uint8_t cone = 0;
  std::uint16_t j = 0;
  std::int32_t k = 0;
  std::int64_t m1_lo = 0, m1_hi = -1, m2_lo = 0, m2_hi = -1;
  std::vector<double> values;
};

struct CoefficientDump {
  std::uint32_t version = 1;
  double c = 1;
  std::uint32_t J = 0;
  std::vector<CoefficientDumpSlab> slabs;
};

inline CoefficientDump to_dump(const CoefficientSet& coeffs) {
  const ShearletSystem& sys = coeffs.system();
  CoefficientDump d;
  d.c = sys.c();
  d.J = static_cast<std::uint32_t>(sys.J());
  for (const Slab& s : sys.slabs()) {
    CoefficientDumpSlab out;
    out.cone = static_cast<std::uint8_t>(s.cone);
    out.j = static_cast<std::uint16_t>(s.j);
    out.k = s.k;
    out.m1_lo = s.m1_lo();
    out.m1_hi = s.m1_hi();
    out.m2_lo = s.m2_lo();
    out.m2_hi = s.m2_hi();
    const auto v = coeffs.slab(s);
    out.values.assign(v.begin(), v.end());
    d.slabs.push_back(std::move(out));
  }
  return d;
}

inline std::string encode_coefficients(const CoefficientDump& d) {
  detail::ByteWriter w;
  w.raw("SHSPCOEF");
  w.put(d.version);
  w.put(d.c);
  w.put(d.J);
  w.put(static_cast<std::uint32_t>(d.slabs.size()));
  for (const auto& s : d.slabs) {
    w.put(s.cone);
    w.put(s.j);
    w.put(s.k);
    w.put(s.m1_lo);
    w.put(s.m1_hi);
    w.put(s.m2_lo);
    w.put(s.m2_hi);
    for (double v : s.values) w.put(v);
  }
  return w.bytes();
}

inline std::string encode_coefficients(const CoefficientSet& coeffs) { return encode_coefficients(to_dump(coeffs)); }

inline CoefficientDump decode_coefficients(std::string_view bytes) {
  detail::ByteReader r(bytes, "coefficient dump");
  if (r.raw(8) != "SHSPCOEF") fail(ErrorKind::ParseError, "coefficient dump: bad magic");
  CoefficientDump d;
  d.version = r.get<std::uint32_t>();
  if (d.version != 1) fail(ErrorKind::ParseError, "coefficient dump: unsupported version " + std::to_string(d.version));
  d.c = r.get<double>();
  d.J = r.get<std::uint32_t>();
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    CoefficientDumpSlab s;
    s.cone = r.get<std::uint8_t>();
    s.j = r.get<std::uint16_t>();
    s.k = r.get<std::int32_t>();
    s.m1_lo = r.get<std::int64_t>();
    s.m1_hi = r.get<std::int64_t>();
    s.m2_lo = r.get<std::int64_t>();
    s.m2_hi = r.get<std::int64_t>();
    if (s.cone > 2 || s.m1_hi < s.m1_lo - 1 || s.m2_hi < s.m2_lo - 1)
      fail(ErrorKind::ParseError, "coefficient dump: bad slab header");
    const auto size = static_cast<std::size_t>((s.m1_hi - s.m1_lo + 1) * (s.m2_hi - s.m2_lo + 1));
    if (size > bytes.size() / 8) fail(ErrorKind::ParseError, "coefficient dump: slab larger than file");
    s.values.resize(size);
    for (double& v : s.values) v = r.get<double>();
    d.slabs.push_back(std::move(s));
  }
  if (!r.done()) fail(ErrorKind::ParseError, "coefficient dump: trailing bytes");
  return d;
}

// Rebuilds a CoefficientSet; the dump must describe exactly this system.
inline CoefficientSet from_dump(const CoefficientDump& d, std::shared_ptr<const ShearletSystem> system) {
  if (d.c != system->c() || d.J != static_cast<std::uint32_t>(system->J()) || d.slabs.size() != system->slabs().size())
    fail(ErrorKind::InvalidArgument, "coefficient dump does not match the system");
  CoefficientSet out(system);
  for (std::size_t i = 0; i < d.slabs.size(); ++i) {
    const Slab& s = system->slabs()[i];
    const CoefficientDumpSlab& ds = d.slabs[i];
    if (ds.cone != static_cast<std::uint8_t>(s.cone) || ds.j != s.j || ds.k != s.k || ds.m1_lo != s.m1_lo() ||
        ds.m1_hi != s.m1_hi() || ds.m2_lo != s.m2_lo() || ds.m2_hi != s.m2_hi())
      fail(ErrorKind::InvalidArgument, "coefficient dump slab " + std::to_string(i) + " does not match the system");
    std::copy(ds.values.begin(), ds.values.end(), out.slab(s).begin());
  }
  return out;
}

}  // namespace shearsparse
