#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shearsparse/approximation.hpp"
#include "shearsparse/decay_lab.hpp"
#include "shearsparse/error.hpp"
#include "shearsparse/fit.hpp"
#include "shearsparse/frame.hpp"
#include "shearsparse/io.hpp"
#include "shearsparse/keyvalue.hpp"
#include "shearsparse/plot.hpp"
#include "shearsparse/scene.hpp"

namespace shearsparse {

namespace fs = std::filesystem;

enum class ExperimentKind { nterm, baseline_compare, edge_decay, bessel, counting, frame_bounds };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::nterm: return "nterm";
    case ExperimentKind::baseline_compare: return "baseline-compare";
    case ExperimentKind::edge_decay: return "edge-decay";
    case ExperimentKind::bessel: return "bessel";
    case ExperimentKind::counting: return "counting";
    case ExperimentKind::frame_bounds: return "frame-bounds";
  }
  return "?";
}

// Default N grid: 2^{e/2} for e = 12..26, i.e. 64 .. 8192 in half-octaves.
inline std::vector<std::size_t> default_ns() {
  std::vector<std::size_t> ns;
  for (int e = 12; e <= 26; ++e) ns.push_back(static_cast<std::size_t>(std::llround(std::exp2(0.5 * e))));
  return ns;
}

struct ExperimentConfig {
  fs::path source;
  fs::path scene_path;
  fs::path generator_path;
  ExperimentKind kind = ExperimentKind::nterm;
  std::size_t n = 512;
  int J = 5;
  double c = 1.0;
  std::size_t oversample = 8;
  fs::path output = "out";
  std::uint64_t seed = 1;
  double tol = 1e-8;
  std::size_t max_iter = 500;
  std::vector<std::size_t> Ns = default_ns();
  double fit_min = 64;
  double fit_max = 8192;
  bool timing = false;  // wall-clock columns are written as 0 unless set
  // edge-decay
  double probe_theta = 0.0;
  int regime = 0;  // 0: every regime the probe slope admits
  int j_min = 0;
  int j_max = -1;  // -1: J
  std::size_t spread_scales = 3;
  double window_pad = 1.0;  // edge-decay cube window, in cube half-sides; 0 = whole image
  // counting
  double decades = 3.0;
  std::size_t eps_count = 13;
  double eps_top = 1.0;  // largest epsilon relative to the largest normalized coefficient
  // frame-bounds
  double bounds_tol = 1e-6;
  std::size_t bounds_max_iter = 500;
};

namespace detail {

template <class F>
auto field(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid) throw;
    fail_field(ErrorKind::ConfigInvalid, name, e.what());
  }
}

}  // namespace detail

// Reads a config. Overrides are "key=value" strings applied on top of the file.
// Relative scene/generator paths resolve against the config file's directory.
inline ExperimentConfig parse_config(KeyValues kv, const fs::path& source, const std::vector<std::string>& overrides = {}) {
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) fail_field(ErrorKind::ConfigInvalid, o, "override must read key=value");
    kv.set(o.substr(0, eq), o.substr(eq + 1));
  }
  static const char* const known[] = {"kind",  "scene",         "generator", "n",       "J",        "c",
                                      "oversample", "output",   "seed",      "tol",     "max_iter", "Ns",
                                      "fit_min",    "fit_max",  "timing",    "probe_theta", "regime", "j_min",
                                      "j_max",      "spread_scales", "decades", "eps_count", "eps_top", "bounds_tol",
                                      "bounds_max_iter", "window_pad"};
  for (const auto& [key, value] : kv.entries())
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      fail_field(ErrorKind::ConfigInvalid, key, "unknown key");

  ExperimentConfig cfg;
  cfg.source = source;
  const fs::path base = source.has_parent_path() ? source.parent_path() : fs::path(".");
  using detail::field;

  const std::string kind = field("kind", [&] { return kv.text("kind"); });
  const std::pair<const char*, ExperimentKind> kinds[] = {
      {"nterm", ExperimentKind::nterm},       {"baseline-compare", ExperimentKind::baseline_compare},
      {"edge-decay", ExperimentKind::edge_decay}, {"bessel", ExperimentKind::bessel},
      {"counting", ExperimentKind::counting}, {"frame-bounds", ExperimentKind::frame_bounds}};
  bool matched = false;
  for (const auto& [name, k] : kinds)
    if (kind == name) cfg.kind = k, matched = true;
  if (!matched) fail_field(ErrorKind::ConfigInvalid, "kind", "unknown experiment kind '" + kind + "'");

  auto resolve = [&](const std::string& key) {
    const fs::path p = field(key, [&] { return fs::path(kv.text(key)); });
    const fs::path full = p.is_absolute() ? p : base / p;
    if (!fs::exists(full)) fail_field(ErrorKind::ConfigInvalid, key, "file not found: " + full.string());
    return full;
  };
  cfg.scene_path = cfg.kind == ExperimentKind::frame_bounds && !kv.has("scene") ? fs::path() : resolve("scene");
  cfg.generator_path = resolve("generator");

  auto integer = [&](const char* key, long long fallback, long long lo) {
    const long long v = field(key, [&] { return kv.integer(key, fallback); });
    if (v < lo) fail_field(ErrorKind::ConfigInvalid, key, "must be at least " + std::to_string(lo));
    return v;
  };
  auto real = [&](const char* key, double fallback) { return field(key, [&] { return kv.number(key, fallback); }); };

  cfg.n = static_cast<std::size_t>(integer("n", 512, 1));
  if (!is_power_of_two(cfg.n)) fail_field(ErrorKind::ConfigInvalid, "n", std::to_string(cfg.n) + " is not a power of two");
  cfg.J = static_cast<int>(integer("J", 5, 0));
  if (cfg.J > 12) fail_field(ErrorKind::ConfigInvalid, "J", "must be at most 12");
  cfg.c = real("c", 1.0);
  if (!(cfg.c > 0)) fail_field(ErrorKind::ConfigInvalid, "c", "must be positive");
  cfg.oversample = static_cast<std::size_t>(integer("oversample", 8, 1));
  cfg.output = field("output", [&] { return fs::path(kv.text("output", "out")); });
  cfg.seed = static_cast<std::uint64_t>(integer("seed", 1, 0));
  cfg.tol = real("tol", 1e-8);
  if (!(cfg.tol > 0 && cfg.tol < 1)) fail_field(ErrorKind::ConfigInvalid, "tol", "must lie in (0,1)");
  cfg.max_iter = static_cast<std::size_t>(integer("max_iter", 500, 1));
  if (kv.has("Ns")) {
    cfg.Ns.clear();
    for (double v : field("Ns", [&] { return kv.numbers("Ns"); })) {
      if (!(v >= 0) || v != std::floor(v)) fail_field(ErrorKind::ConfigInvalid, "Ns", "entries must be non-negative integers");
      if (!cfg.Ns.empty() && static_cast<std::size_t>(v) <= cfg.Ns.back())
        fail_field(ErrorKind::ConfigInvalid, "Ns", "must be strictly ascending");
      cfg.Ns.push_back(static_cast<std::size_t>(v));
    }
  }
  cfg.fit_min = real("fit_min", 64);
  cfg.fit_max = real("fit_max", 8192);
  if (!(cfg.fit_max > cfg.fit_min)) fail_field(ErrorKind::ConfigInvalid, "fit_max", "must exceed fit_min");
  cfg.timing = integer("timing", 0, 0) != 0;
  cfg.probe_theta = real("probe_theta", 0.0);
  cfg.regime = static_cast<int>(integer("regime", 0, 0));
  if (cfg.regime > 2) fail_field(ErrorKind::ConfigInvalid, "regime", "must be 0, 1 or 2");
  cfg.j_min = static_cast<int>(integer("j_min", 0, 0));
  cfg.j_max = static_cast<int>(field("j_max", [&] { return kv.integer("j_max", cfg.J); }));
  if (cfg.j_max > cfg.J || cfg.j_max < cfg.j_min) fail_field(ErrorKind::ConfigInvalid, "j_max", "must lie in [j_min, J]");
  cfg.spread_scales = static_cast<std::size_t>(integer("spread_scales", 3, 1));
  cfg.window_pad = real("window_pad", 1.0);
  if (!(cfg.window_pad >= 0)) fail_field(ErrorKind::ConfigInvalid, "window_pad", "must be non-negative");
  cfg.decades = real("decades", 3.0);
  if (!(cfg.decades > 0)) fail_field(ErrorKind::ConfigInvalid, "decades", "must be positive");
  cfg.eps_count = static_cast<std::size_t>(integer("eps_count", 13, 2));
  cfg.eps_top = real("eps_top", 1.0);
  if (!(cfg.eps_top > 0)) fail_field(ErrorKind::ConfigInvalid, "eps_top", "must be positive");
  cfg.bounds_tol = real("bounds_tol", 1e-6);
  if (!(cfg.bounds_tol > 0 && cfg.bounds_tol < 1)) fail_field(ErrorKind::ConfigInvalid, "bounds_tol", "must lie in (0,1)");
  cfg.bounds_max_iter = static_cast<std::size_t>(integer("bounds_max_iter", 500, 1));

  const std::size_t min_n = std::size_t{8} << cfg.J;
  if (cfg.n < min_n)
    fail_field(ErrorKind::ConfigInvalid, "n", "grid of " + std::to_string(cfg.n) + " is too coarse for J = " +
                                                   std::to_string(cfg.J) + " (need " + std::to_string(min_n) + ")");
  return cfg;
}

inline ExperimentConfig load_config(const fs::path& path, const std::vector<std::string>& overrides = {}) {
  KeyValues kv;
  try {
    kv = KeyValues::load(path.string());
  } catch (const Error& e) {
    fail_field(ErrorKind::ConfigInvalid, "config", e.what());
  }
  return parse_config(std::move(kv), path, overrides);
}

// ---------------------------------------------------------------------------
// Artifacts and manifests

struct Artifact {
  std::string path;  // relative to the output directory
  std::uint64_t size = 0;
  std::uint64_t hash = 0;
};

struct Manifest {
  fs::path directory;
  std::vector<Artifact> artifacts;

  std::string encode() const {
    std::string s = "# shearsparse manifest 1\n";
    for (const auto& a : artifacts) s += a.path + " " + std::to_string(a.size) + " " + hex64(a.hash) + "\n";
    return s;
  }
};

inline constexpr const char* kManifestName = "manifest.txt";

// Parses and verifies a manifest: every artifact must exist with the recorded size and hash.
inline Manifest load_manifest(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::ManifestCorrupt, e.what());
  }
  Manifest m;
  m.directory = path.parent_path();
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Artifact a;
    std::string hash;
    if (!(ls >> a.path >> a.size >> hash) || hash.size() != 16 || !ls.eof())
      fail(ErrorKind::ManifestCorrupt, path.string() + ":" + std::to_string(line_no) + ": malformed line");
    char* end = nullptr;
    a.hash = std::strtoull(hash.c_str(), &end, 16);
    if (end != hash.c_str() + hash.size())
      fail(ErrorKind::ManifestCorrupt, path.string() + ":" + std::to_string(line_no) + ": bad hash");
    std::string bytes;
    try {
      bytes = read_file(m.directory / a.path);
    } catch (const Error&) {
      fail(ErrorKind::ManifestCorrupt, "artifact " + a.path + " is missing");
    }
    if (bytes.size() != a.size || fnv1a64(bytes) != a.hash)
      fail(ErrorKind::ManifestCorrupt, "artifact " + a.path + " does not match its recorded size/hash");
    m.artifacts.push_back(std::move(a));
  }
  return m;
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, std::string_view bytes) {
    write_file(dir_ / name, bytes);
    manifest_.artifacts.push_back({name, bytes.size(), fnv1a64(bytes)});
  }

  fs::path finish() {
    manifest_.directory = dir_;
    const fs::path p = dir_ / kManifestName;
    write_file(p, manifest_.encode());
    return p;
  }

  const Manifest& manifest() const { return manifest_; }

 private:
  fs::path dir_;
  Manifest manifest_;
};

// Numbers at full round-trip precision, so byte equality means value equality.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  std::string str() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
      s += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Summary rows shared by run and summarize

struct SummaryRow {
  std::string kind, image, system;
  std::map<std::string, std::string> values;  // beta_shearlet, beta_wavelet, frame_A, frame_B, count_exponent
};

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{"beta_shearlet", "beta_wavelet", "frame_A", "frame_B", "count_exponent"};
  return cols;
}

inline std::string encode_summary(const SummaryRow& r) {
  CsvTable t({"kind", "image", "system", "beta_shearlet", "beta_wavelet", "frame_A", "frame_B", "count_exponent"});
  std::vector<std::string> cells{r.kind, r.image, r.system};
  for (const auto& c : summary_columns()) {
    const auto it = r.values.find(c);
    cells.push_back(it == r.values.end() ? "" : it->second);
  }
  t.row(std::move(cells));
  return t.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  for (char ch : line) {
    if (ch == ',') out.emplace_back();
    else if (ch != '\r') out.back() += ch;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Running experiments

struct RunOptions {
  unsigned workers = 1;
  fs::path output_override;  // SHEARSPARSE_OUT, when set
};

struct RunResult {
  fs::path output;
  fs::path manifest;
  std::vector<Artifact> artifacts;
  std::map<std::string, double> metrics;
};

namespace detail {

inline std::string curve_csv(const ErrorCurve& c, bool timing) {
  CsvTable t({"N", "squared_error", "reconstruction_iters", "wall_ms", "tail"});
  for (const auto& p : c.points)
    t.row({std::to_string(p.N), num(p.squared_error), std::to_string(p.iterations), num(timing ? p.wall_ms : 0.0),
           num(p.tail)});
  return t.str();
}

// Pure-power and log^3 fits of e against x over [lo, hi], cut short before the
// first non-positive value (an exhausted curve). When `optional`, a degenerate
// fit leaves the rows out and records NaN.
inline void rate_rows(CsvTable& t, const std::string& image, const std::string& system, const std::string& curve,
                      const std::vector<double>& x, const std::vector<double>& e, double lo, double hi,
                      std::map<std::string, double>& metrics, bool optional = false) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= lo && !(e[i] > 0.0)) {
      hi = std::min(hi, std::nextafter(x[i], -INFINITY));
      break;
    }
  RateReport pure, logfit;
  try {
    pure = fit_rate(x, e, RateModel::pure_power, std::nullopt, lo, hi);
    logfit = fit_rate(x, e, RateModel::power_with_log, 3.0, lo, hi);
  } catch (const Error& err) {
    if (!optional || err.kind() != ErrorKind::DegenerateFit) throw;
    metrics["beta_" + curve] = NAN;
    metrics["beta_" + curve + "_log3"] = NAN;
    return;
  }
  for (const RateReport& r : {pure, logfit})
    t.row({image, system, curve, to_string(r.model), num(r.beta), num(r.log_exponent), num(r.log_constant),
           num(r.residual), num(r.fit_min), num(r.fit_max), std::to_string(r.points)});
  metrics["beta_" + curve] = pure.beta;
  metrics["beta_" + curve + "_log3"] = logfit.beta;
}

inline CsvTable rate_table() {
  return CsvTable({"image", "system", "curve", "model", "beta", "log_exponent", "log_constant", "residual", "fit_min",
                   "fit_max", "points"});
}

inline std::string metrics_csv(const std::map<std::string, double>& m) {
  CsvTable t({"metric", "value"});
  for (const auto& [k, v] : m) t.row({k, num(v)});
  return t.str();
}

}  // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  const fs::path out = opt.output_override.empty() ? cfg.output : opt.output_override;
  Scene scene;
  if (!cfg.scene_path.empty()) {
    try {
      scene = load_scene(cfg.scene_path.string());
    } catch (const Error& e) {
      fail_field(ErrorKind::ConfigInvalid, "scene", e.what());
    }
  }
  std::shared_ptr<const GeneratorSpec> spec;
  try {
    spec = std::make_shared<GeneratorSpec>(load_generator(cfg.generator_path.string()));
  } catch (const Error& e) {
    fail_field(ErrorKind::ConfigInvalid, "generator", e.what());
  }

  RunResult result;
  try {
    auto system = std::make_shared<const ShearletSystem>(spec, SystemConfig{cfg.c, cfg.J, 0});
    const std::string image = (scene.name.empty() ? std::string("none") : scene.name) + " n=" + std::to_string(cfg.n);
    const std::string sysname = generator_label(*spec) + " c=" + num(cfg.c) + " J=" + std::to_string(cfg.J);
    ArtifactWriter w(out);
    SummaryRow summary{to_string(cfg.kind), image, sysname, {}};
    auto& metrics = result.metrics;
    const unsigned workers = opt.workers;

    auto raster = [&] { return rasterize(scene.image, cfg.n, cfg.oversample, workers); };

    switch (cfg.kind) {
      case ExperimentKind::nterm:
      case ExperimentKind::baseline_compare: {
        const Grid g = raster();
        const ErrorCurve sc = nterm_error_curve(g, system, cfg.Ns, {cfg.tol, cfg.max_iter, workers});
        if (!sc.non_increasing()) fail(ErrorKind::ExperimentFailed, "shearlet error curve is not non-increasing");
        metrics["floor"] = sc.floor;
        metrics["norm_sq"] = norm_sq(g);
        CsvTable rates = detail::rate_table();
        detail::rate_rows(rates, image, sysname, "shearlet", sc.ns(), sc.errors(), cfg.fit_min, cfg.fit_max, metrics);
        detail::rate_rows(rates, image, sysname, "shearlet_tail", sc.ns(), sc.tails(), cfg.fit_min, cfg.fit_max, metrics, true);
        summary.values["beta_shearlet"] = num(metrics["beta_shearlet"]);
        std::vector<PlotSeries> plot{{"shearlet", sc.ns(), sc.errors(), "#1f77b4", false}};
        const bool compare = cfg.kind == ExperimentKind::baseline_compare;
        if (compare) {
          const ErrorCurve wc = wavelet_baseline(g, spec->filter.order, cfg.Ns);
          detail::rate_rows(rates, image, sysname, "wavelet", wc.ns(), wc.errors(), cfg.fit_min, cfg.fit_max, metrics);
          summary.values["beta_wavelet"] = num(metrics["beta_wavelet"]);
          metrics["delta_beta"] = metrics["beta_shearlet"] - metrics["beta_wavelet"];
          w.write("errors_shearlet.csv", detail::curve_csv(sc, cfg.timing));
          w.write("errors_wavelet.csv", detail::curve_csv(wc, cfg.timing));
          plot.push_back({"wavelet", wc.ns(), wc.errors(), "#d62728", false});
        } else {
          w.write("errors.csv", detail::curve_csv(sc, cfg.timing));
        }
        for (auto& s : reference_slopes(sc.ns(), sc.errors())) plot.push_back(std::move(s));
        w.write("errors.svg", loglog_svg(image + ", " + sysname, "N", "squared error", plot));
        w.write("rate.csv", rates.str());
        w.write("coefficients.bin", encode_coefficients(analyze(g, system, {workers})));
        break;
      }
      case ExperimentKind::edge_decay: {
        if (!scene.image.has_boundary) fail_field(ErrorKind::ConfigInvalid, "scene", "edge-decay needs a boundary");
        const EdgeProbe probe = make_probe(scene.image.boundary, cfg.probe_theta);
        const double s = probe.slope;
        std::vector<int> regimes;
        if (cfg.regime == 0) {
          if (std::abs(s) <= 3.0) regimes.push_back(1);
          if (std::abs(s) > 1.5) regimes.push_back(2);
        } else {
          regimes.push_back(cfg.regime);
        }
        CsvTable rows({"regime", "j", "k", "translates", "max_coefficient", "ratio"});
        CsvTable scales({"regime", "j", "max_ratio"});
        const std::vector<DecayTable> tables = localized_edge_decay(
            scene.image, system, probe, cfg.j_min, cfg.j_max, regimes, cfg.n, {cfg.window_pad, cfg.oversample, workers});
        for (const DecayTable& t : tables) {
          const std::string regime = std::to_string(t.regime);
          for (const auto& r : t.rows)
            rows.row({regime, std::to_string(r.j), std::to_string(r.k), std::to_string(r.translates),
                      num(r.max_coefficient), num(r.ratio)});
          for (const auto& [j, m] : t.max_ratio_per_j) scales.row({regime, std::to_string(j), num(m)});
          metrics["spread_regime" + regime] = t.spread(cfg.spread_scales);
        }
        metrics["slope"] = std::isinf(s) ? 1e308 : s;
        w.write("decay.csv", rows.str());
        w.write("decay_scales.csv", scales.str());
        break;
      }
      case ExperimentKind::bessel: {
        if (scene.image.has_boundary) fail_field(ErrorKind::ConfigInvalid, "scene", "bessel needs an edge-free scene");
        const SmoothPatch& g = scene.image.smooth_part;
        const BesselCheck b = smooth_bessel_check(g, system, cfg.n, cfg.oversample, workers);
        CsvTable t({"J", "partial_sum", "ratio"});
        for (std::size_t j = 0; j < b.partial_sums.size(); ++j)
          t.row({std::to_string(j), num(b.partial_sums[j]), num(b.ratios[j])});
        metrics["denominator"] = b.denominator;
        metrics["final_increment"] = b.final_increment();
        w.write("bessel.csv", t.str());
        const TailRate tr = smooth_part_rate(g, system, cfg.n, cfg.Ns, cfg.oversample, workers);
        CsvTable tails({"N", "tail"});
        for (std::size_t i = 0; i < tr.ns.size(); ++i) tails.row({std::to_string(tr.ns[i]), num(tr.tails[i])});
        w.write("tail.csv", tails.str());
        std::vector<double> x(tr.ns.begin(), tr.ns.end());
        CsvTable rates = detail::rate_table();
        detail::rate_rows(rates, image, sysname, "smooth_tail", x, tr.tails, cfg.fit_min, cfg.fit_max, metrics);
        w.write("rate.csv", rates.str());
        std::vector<PlotSeries> plot{{"coefficient tail", x, tr.tails, "#1f77b4", false}};
        for (auto& s : reference_slopes(x, tr.tails)) plot.push_back(std::move(s));
        w.write("tail.svg", loglog_svg(image + ", " + sysname, "N", "sum of dropped squared coefficients", plot));
        break;
      }
      case ExperimentKind::counting: {
        const CoefficientSet coeffs = analyze(raster(), system, {workers});
        const std::vector<double> mags = normalized_magnitudes(coeffs);
        if (mags.empty() || !(mags.front() > 0)) fail(ErrorKind::ExperimentFailed, "all coefficients vanish");
        const CountReport r = significant_count(coeffs, epsilon_ladder(mags.front() * cfg.eps_top, cfg.decades, cfg.eps_count));
        CsvTable t({"epsilon", "count", "scale_cutoff"});
        for (std::size_t i = 0; i < r.epsilons.size(); ++i)
          t.row({num(r.epsilons[i]), std::to_string(r.counts[i]), num(4.0 / 3.0 * std::log2(1.0 / r.epsilons[i]))});
        w.write("counts.csv", t.str());
        metrics["count_exponent"] = r.exponent;
        metrics["count_exponent_with_log"] = r.exponent_with_log;
        metrics["count_log_exponent"] = r.log_exponent;
        metrics["count_residual"] = r.residual;
        summary.values["count_exponent"] = num(r.exponent);
        if (scene.image.has_boundary) {
          CsvTable cubes({"j", "cubes", "ratio"});
          for (int j = 0; j <= 2 * cfg.J; ++j) {
            const std::size_t q = boundary_cube_count(scene.image.boundary, j);
            cubes.row({std::to_string(j), std::to_string(q), num(static_cast<double>(q) / std::exp2(0.5 * j))});
          }
          w.write("cubes.csv", cubes.str());
        }
        std::vector<double> inv, cnt;
        for (std::size_t i = 0; i < r.epsilons.size(); ++i)
          if (r.counts[i] > 0) inv.push_back(1.0 / r.epsilons[i]), cnt.push_back(static_cast<double>(r.counts[i]));
        w.write("counts.svg", loglog_svg(image + ", " + sysname, "1/epsilon", "count", {{"count", inv, cnt, "#1f77b4", false}}));
        break;
      }
      case ExperimentKind::frame_bounds: {
        BoundsOptions bo;
        bo.tol = cfg.bounds_tol;
        bo.max_iter = cfg.bounds_max_iter;
        bo.seed = cfg.seed;
        const FrameBounds fb = estimate_frame_bounds(system, cfg.n, bo, workers);
        CsvTable t({"lower", "upper", "ratio", "upper_iterations", "lower_iterations", "inner_iterations", "upper_residual",
                    "lower_residual"});
        t.row({num(fb.lower), num(fb.upper), num(fb.upper / fb.lower), std::to_string(fb.upper_iterations),
               std::to_string(fb.lower_iterations), std::to_string(fb.inner_iterations), num(fb.upper_residual),
               num(fb.lower_residual)});
        w.write("bounds.csv", t.str());
        metrics["frame_A"] = fb.lower;
        metrics["frame_B"] = fb.upper;
        summary.values["frame_A"] = num(fb.lower);
        summary.values["frame_B"] = num(fb.upper);
        break;
      }
    }
    w.write("metrics.csv", detail::metrics_csv(metrics));
    w.write("summary.csv", encode_summary(summary));
    result.output = out;
    result.manifest = w.finish();
    result.artifacts = w.manifest().artifacts;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid || e.kind() == ErrorKind::ExperimentFailed) throw;
    fail(ErrorKind::ExperimentFailed, e.what());
  } catch (const fs::filesystem_error& e) {
    fail(ErrorKind::ExperimentFailed, e.what());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Summaries across manifests

struct SummaryTable {
  std::vector<SummaryRow> rows;  // joined on (image, system), in first-seen order

  static const std::vector<std::string>& header() {
    static const std::vector<std::string> h{"image",   "system",  "beta_shearlet", "beta_wavelet",
                                            "delta_beta", "frame_A", "frame_B",    "count_exponent"};
    return h;
  }

  std::vector<std::vector<std::string>> cells() const {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows) {
      auto get = [&](const std::string& k) {
        const auto it = r.values.find(k);
        return it == r.values.end() ? std::string() : it->second;
      };
      std::string delta;
      if (!get("beta_shearlet").empty() && !get("beta_wavelet").empty())
        delta = num(std::stod(get("beta_shearlet")) - std::stod(get("beta_wavelet")));
      out.push_back({r.image, r.system, get("beta_shearlet"), get("beta_wavelet"), delta, get("frame_A"), get("frame_B"),
                     get("count_exponent")});
    }
    return out;
  }

  std::string csv() const {
    CsvTable t(header());
    for (auto& c : cells()) t.row(std::move(c));
    return t.str();
  }

  std::string text() const {
    std::vector<std::vector<std::string>> all{header()};
    for (auto& c : cells()) all.push_back(std::move(c));
    std::vector<std::size_t> width(header().size(), 0);
    for (const auto& r : all)
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    std::string s;
    for (const auto& r : all) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        s += r[i];
        if (i + 1 < r.size()) s += std::string(width[i] - r[i].size() + 2, ' ');
      }
      s += '\n';
    }
    return s;
  }
};

inline SummaryTable summarize(const std::vector<fs::path>& manifests) {
  SummaryTable table;
  for (const fs::path& p : manifests) {
    const Manifest m = load_manifest(p);
    const auto it = std::find_if(m.artifacts.begin(), m.artifacts.end(), [](const Artifact& a) { return a.path == "summary.csv"; });
    if (it == m.artifacts.end()) fail(ErrorKind::ManifestCorrupt, p.string() + " lists no summary.csv");
    std::istringstream in(read_file(m.directory / it->path));
    std::string header, line;
    std::getline(in, header);
    const std::vector<std::string> cols = split_csv_line(header);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> cells = split_csv_line(line);
      if (cells.size() != cols.size()) fail(ErrorKind::ManifestCorrupt, p.string() + ": malformed summary row");
      SummaryRow row;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "kind") row.kind = cells[i];
        else if (cols[i] == "image") row.image = cells[i];
        else if (cols[i] == "system") row.system = cells[i];
        else if (!cells[i].empty()) row.values[cols[i]] = cells[i];
      }
      auto target = std::find_if(table.rows.begin(), table.rows.end(),
                                 [&](const SummaryRow& r) { return r.image == row.image && r.system == row.system; });
      if (target == table.rows.end()) {
        table.rows.push_back(std::move(row));
      } else {
        for (const auto& [k, v] : row.values) target->values.emplace(k, v);
      }
    }
  }
  return table;
}

}  // namespace shearsparse
