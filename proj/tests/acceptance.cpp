// Acceptance run: one PASS/FAIL line per criterion 1..10, with the measured
// values. Exit status is 0 unless --strict is given and a criterion failed.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shearsparse/experiment.hpp"

using namespace shearsparse;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = SHEARSPARSE_DATA_DIR;
const fs::path work_dir = SHEARSPARSE_WORK_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

RunResult run_config(const std::string& name, unsigned workers = 1, const std::vector<std::string>& sets = {}) {
  const ExperimentConfig cfg = load_config(data_dir / "configs" / (name + ".cfg"), sets);
  return run_experiment(cfg, {workers, work_dir / name});
}

std::shared_ptr<const GeneratorSpec> db3() {
  static const auto spec = std::make_shared<GeneratorSpec>(build_generators({"daubechies", 3, 12}));
  return spec;
}

std::shared_ptr<const ShearletSystem> make_system(int J) {
  return std::make_shared<ShearletSystem>(db3(), SystemConfig{1.0, J, 0});
}

Grid random_grid(std::size_t n, std::uint64_t seed) {
  Grid g(n);
  CounterRng rng(seed, 0);
  for (double& v : g.values()) v = rng.normal();
  return g;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// 1. shearlet vs wavelet rates on the three cartoon scenes
void rate_separation(Outcome& o) {
  for (const char* scene : {"disk", "star", "ellipse"}) {
    const RunResult r = run_config(std::string("baseline_") + scene);
    const double bs = r.metrics.at("beta_shearlet"), bw = r.metrics.at("beta_wavelet");
    o.detail << " " << scene << ": beta_shearlet=" << fmt(bs) << " beta_wavelet=" << fmt(bw) << " delta=" << fmt(bs - bw);
    o.check(bs - bw >= 0.3, std::string(scene) + " delta < 0.3");
    o.check(bw >= 0.8 && bw <= 1.3, std::string(scene) + " beta_wavelet outside [0.8, 1.3]");
  }
}

// 2. coefficient tail of an edge-free bump
void smooth_rate(Outcome& o) {
  const RunResult r = run_config("smooth_rate");
  const double b = r.metrics.at("beta_smooth_tail");
  o.detail << " beta=" << fmt(b);
  o.check(b >= 1.7, "beta < 1.7");
}

// 3. weighted Bessel partial sums settle; the ratio ignores scalar multiples
void bessel(Outcome& o) {
  const RunResult r = run_config("bessel");
  const double inc = r.metrics.at("final_increment");
  o.detail << " final_increment=" << fmt(inc);
  o.check(inc <= 0.05, "final increment > 5%");

  const auto sys = make_system(3);
  const SmoothPatch g = SmoothPatch::bump_sum({{0.002, {0.5, 0.5}, 0.45}});
  const BesselCheck a = smooth_bessel_check(g, sys, 64, 2), b = smooth_bessel_check(g.scaled(0.37), sys, 64, 2);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.ratios.size(); ++i) worst = std::max(worst, std::abs(a.ratios[i] - b.ratios[i]) / a.ratios[i]);
  o.detail << " scalar_invariance=" << fmt(worst);
  o.check(worst <= 1e-12, "ratio changes under scaling");
}

void edge_decay(Outcome& o, const std::string& config, int regime) {
  const RunResult r = run_config(config);
  const double s = r.metrics.at("spread_regime" + std::to_string(regime));
  o.detail << " spread=" << fmt(s);
  o.check(s <= 4.0, "spread > 4");
}

// 6. significant-coefficient count exponent on the disk
void counting(Outcome& o) {
  const RunResult r = run_config("counting_disk");
  const double e = r.metrics.at("count_exponent");
  o.detail << " exponent=" << fmt(e);
  o.check(e >= 0.55 && e <= 0.85, "exponent outside [0.55, 0.85]");
}

// 7. adjointness, atom norms, vanishing moments
void transform_correctness(Outcome& o) {
  {
    const auto sys = make_system(3);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const Grid g = random_grid(64, 100 + s);
      CoefficientSet d(sys);
      CounterRng rng(500 + s, 1);
      for (std::size_t p : sys->positions()) d.dense()[p] = rng.normal();
      const CoefficientSet tg = analyze(g, sys);
      worst = std::max(worst, std::abs(inner(tg, d) - inner(g, synthesize(d, 64))) / std::sqrt(norm_sq(tg) * norm_sq(d)));
    }
    o.detail << " adjoint=" << fmt(worst);
    o.check(worst <= 1e-10, "adjointness");
  }
  {
    const ShearletSystem sys(db3(), {1.0, 5, 0});
    const int depth = log2_exact(sys.config().atom_resolution) - sys.J();
    const double psi = std::sqrt(db3()->psi1.coarsened(depth).norm_l2_sq() * db3()->psi2.coarsened(depth).norm_l2_sq());
    const double phi = db3()->psi2.coarsened(depth).norm_l2_sq();
    double worst = 0.0;
    sys.for_each_index([&](const ShearletIndex& idx, std::size_t) {
      const double ref = idx.cone == Cone::coarse ? phi : psi;
      worst = std::max(worst, std::abs(atom(sys, idx).norm_l2() - ref) / ref);
    });
    o.detail << " atom_norm=" << fmt(worst);
    o.check(worst <= 1e-5, "atom norm invariance");
  }
  {
    const GeneratorSpec& g = *db3();
    const auto v1 = g.psi1.values();
    const double h = g.psi1.step(), scale = g.psi_norm_l1();
    double worst = 0.0;
    for (int k = -shear_bound(5); k <= shear_bound(5); ++k)
      for (int q = 0; q <= 40; ++q) {
        const double x2 = q * 0.125;
        for (int l : {0, 1}) {
          double s = 0.0;
          for (std::size_t i = 0; i < v1.size(); ++i) s += std::pow(h * static_cast<double>(i) - k * x2, l) * v1[i];
          worst = std::max(worst, std::abs(s * h * g.psi2(x2)) / scale);
        }
      }
    o.detail << " moments=" << fmt(worst);
    o.check(worst <= 1e-8, "vanishing moments");
  }
}

// 8. frame bounds and dual reconstruction
void frame_machinery(Outcome& o) {
  const double tol = 1e-8;
  const Wavelet2D w(3);
  const FrameBounds toy = estimate_frame_bounds([&](const Grid& g) { return w.inverse(w.forward(g)); }, make_span(32, 32),
                                                {tol, 500, 2000, 1});
  o.detail << " toy=[" << fmt(toy.lower) << "," << fmt(toy.upper) << "]";
  o.check(std::abs(toy.lower - 1) <= tol && std::abs(toy.upper - 1) <= tol, "toy system bounds");

  const auto sys = make_system(2);
  const BlockSpan span = analyzable_span(*sys, 32);
  const FrameBounds one = estimate_frame_bounds(frame_operator(sys), span, {tol, 2000, 2000, 1});
  const FrameBounds two = estimate_frame_bounds(
      [&](const Grid& g) {
        Grid s = frame_apply(g, sys);
        s *= 2.0;
        return s;
      },
      span, {tol, 2000, 2000, 1});
  const double dup = std::max(std::abs(two.lower / one.lower - 2), std::abs(two.upper / one.upper - 2));
  o.detail << " duplication=" << fmt(dup);
  o.check(dup <= 10 * tol, "duplication");

  const auto sys3 = make_system(3);
  const BlockSpan span3 = analyzable_span(*sys3, 64);
  double worst = 0.0;
  bool monotone = true;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Grid g = span3.extend(random_grid(span3.m, 900 + s));
    const Reconstruction r = dual_reconstruct(analyze(g, sys3), 64, {tol, 500, 1, nullptr});
    worst = std::max(worst, norm(r.grid - g) / norm(g));
    const auto& hist = r.report.residual_history;
    for (std::size_t i = 1; i < hist.size(); ++i) monotone = monotone && hist[i] <= hist[i - 1];
  }
  o.detail << " reconstruction=" << fmt(worst);
  o.check(worst <= 10 * tol, "reconstruction error");
  o.check(monotone, "residual not monotone");
}

Eigen::MatrixXd assemble(const GridOperator& op, std::size_t n) {
  const auto d = static_cast<Eigen::Index>(n * n);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Grid e(n);
    e.values()[static_cast<std::size_t>(i)] = 1.0;
    const Grid col = op(e);
    for (Eigen::Index r = 0; r < d; ++r) m(r, i) = col.values()[static_cast<std::size_t>(r)];
  }
  return m;
}

// 9. dense Gram eigenvalues, rasterizer areas, planted fits
void oracles(Outcome& o) {
  const auto sys = make_system(2);
  const BlockSpan span = analyzable_span(*sys, 32);
  const GridOperator s = frame_operator(sys);
  const double B = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(assemble(s, 32), Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double A =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(assemble(restricted(s, span), span.m), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  const FrameBounds fb = estimate_frame_bounds(sys, 32, {1e-10, 5000, 5000, 1});
  const double gram = std::max(std::abs(fb.upper - B) / B, std::abs(fb.lower - A) / A);
  o.detail << " gram=" << fmt(gram);
  o.check(gram <= 1e-4, "dense Gram eigenvalues");

  // circle of radius 1/4 at the center, 4 x 4 pixels: the exact area of a
  // corner-of-circle pixel [1/4,1/2]^2 is the circular segment below
  const std::size_t os = 32;
  const CartoonImage disk{SmoothPatch::zero(), SmoothPatch::constant(1.0), make_radius_profile({}, 0.25, {0.5, 0.5}, 1.0), true};
  const Grid g = rasterize(disk, 4, os);
  // quarter disk of radius r inside an r x r square: pi r^2 / 4, relative to the pixel r^2
  const double quarter = std::numbers::pi / 4;
  double worst = 0.0;
  for (auto [b, a] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}}) worst = std::max(worst, std::abs(g(b, a) - quarter));
  o.detail << " raster=" << fmt(worst);
  o.check(worst <= 1.0 / os, "rasterized straddling pixels");

  std::vector<double> x, e;
  for (int i = 0; i < 11; ++i) {
    x.push_back(64 * std::exp2(i));
    e.push_back(5.0 * std::pow(x.back(), -2.0));
  }
  const double planted = std::abs(fit_rate(x, e, RateModel::pure_power).beta - 2.0);
  o.detail << " fit=" << fmt(planted);
  o.check(planted <= 1e-10, "planted exponent");
}

// 10. byte-identical artifacts across runs and worker counts
void determinism(Outcome& o) {
  const std::vector<std::string> small = {"n=64", "J=3", "oversample=2", "Ns=8,16,32,64,128,256", "fit_min=8", "fit_max=256"};
  bool same = true;
  for (const char* config : {"nterm_disk", "counting_disk"}) {
    std::vector<std::string> sets = small;
    if (std::string(config) == "counting_disk") sets = {"n=128", "J=4", "oversample=2"};
    const ExperimentConfig cfg = load_config(data_dir / "configs" / (std::string(config) + ".cfg"), sets);
    const fs::path a = work_dir / "det" / config / "a", b = work_dir / "det" / config / "b", c = work_dir / "det" / config / "c";
    const RunResult ra = run_experiment(cfg, {1, a});
    run_experiment(cfg, {1, b});
    run_experiment(cfg, {3, c});
    for (const Artifact& art : ra.artifacts) {
      const std::string bytes = read_file(a / art.path);
      same = same && bytes == read_file(b / art.path) && bytes == read_file(c / art.path);
    }
  }
  o.detail << (same ? " all artifacts identical" : " artifacts differ");
  o.check(same, "artifacts differ");
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  fs::create_directories(work_dir);
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"rate separation", rate_separation},
      {"smooth-part rate", smooth_rate},
      {"weighted Bessel bound", bessel},
      {"edge decay, regime 1", [](Outcome& o) { edge_decay(o, "edge_decay_vertical", 1); }},
      {"edge decay, regime 2", [](Outcome& o) { edge_decay(o, "edge_decay_horizontal", 2); }},
      {"significant-coefficient count", counting},
      {"transform correctness", transform_correctness},
      {"frame machinery", frame_machinery},
      {"oracle equivalences", oracles},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [error: " << e.what() << "]";
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "):" << o.detail.str()
              << std::endl;
  }
  std::cout << failed << " of " << criteria.size() << " criteria failed" << std::endl;
  return strict && failed > 0 ? 1 : 0;
}
