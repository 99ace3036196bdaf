#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "shearsparse/cartoon.hpp"
#include "shearsparse/error.hpp"
#include "shearsparse/generator.hpp"
#include "shearsparse/keyvalue.hpp"

namespace shearsparse {

// Scene file grammar (key = value, '#' comments):
//   name        = disk
//   boundary    = star | none
//   base_radius = 0.25
//   translate   = 0.5, 0.5
//   nu          = 1
//   rho0        = 0.45                       (optional)
//   harmonics   = a1 b1 ; a2 b2 ; ...        (optional, cos/sin pair per frequency 1, 2, ...)
//   smooth      = zero | polynomial | bumps  (f0)
//   smooth.coeffs = c0, c1, ...              (graded order 1, x1, x2, x1^2, x1 x2, x2^2, ...)
//   smooth.bumps  = w cx cy r ; ...
//   jump, jump.coeffs, jump.bumps            (f1, same forms)
struct Scene {
  std::string name;
  CartoonImage image;
};

namespace detail {

inline SmoothPatch load_patch(const KeyValues& kv, const std::string& prefix) {
  const std::string kind = kv.text(prefix, "zero");
  if (kind == "zero") return SmoothPatch::zero();
  if (kind == "polynomial") return SmoothPatch::polynomial(kv.numbers(prefix + ".coeffs"));
  if (kind == "bumps") {
    std::vector<SmoothPatch::Bump> bumps;
    for (const auto& g : kv.groups(prefix + ".bumps")) {
      if (g.size() != 4) fail(ErrorKind::ParseError, kv.origin() + ": each of " + prefix + ".bumps needs w cx cy r");
      bumps.push_back({g[0], {g[1], g[2]}, g[3]});
    }
    return SmoothPatch::bump_sum(std::move(bumps));
  }
  fail(ErrorKind::ParseError, kv.origin() + ": unknown " + prefix + " kind '" + kind + "'");
}

}  // namespace detail

inline Scene load_scene(const KeyValues& kv) {
  Scene s;
  s.name = kv.text("name", "scene");
  s.image.smooth_part = detail::load_patch(kv, "smooth");
  s.image.jump_part = detail::load_patch(kv, "jump");
  const std::string boundary = kv.text("boundary", "star");
  if (boundary == "none") {
    s.image.has_boundary = false;
    return s;
  }
  if (boundary != "star") fail(ErrorKind::ParseError, kv.origin() + ": boundary must be 'star' or 'none'");
  std::vector<RadiusProfile::Harmonic> harmonics;
  if (kv.has("harmonics"))
    for (const auto& g : kv.groups("harmonics")) {
      if (g.size() != 2) fail(ErrorKind::ParseError, kv.origin() + ": each harmonic needs a cos and a sin amplitude");
      harmonics.push_back({g[0], g[1]});
    }
  const std::vector<double> t = kv.numbers("translate");
  if (t.size() != 2) fail(ErrorKind::ParseError, kv.origin() + ": translate needs two coordinates");
  s.image.boundary = make_radius_profile(std::move(harmonics), kv.number("base_radius"), {t[0], t[1]}, kv.number("nu"),
                                         kv.number("rho0", 0.45));
  return s;
}

inline Scene load_scene(const std::string& path) { return load_scene(KeyValues::load(path)); }

// Generator spec grammar: family, order, depth, alpha, gamma.
inline GeneratorSpec load_generator(const KeyValues& kv) {
  FilterChoice f;
  f.family = kv.text("family", f.family);
  f.order = static_cast<int>(kv.integer("order", f.order));
  f.depth = static_cast<int>(kv.integer("depth", f.depth));
  return build_generators(f, kv.number("alpha", 5.5), kv.number("gamma", 4.0));
}

inline GeneratorSpec load_generator(const std::string& path) { return load_generator(KeyValues::load(path)); }

inline std::string generator_label(const GeneratorSpec& g) {
  return (g.filter.family == "haar" ? std::string("haar") : "db" + std::to_string(g.filter.order));
}

}  // namespace shearsparse
