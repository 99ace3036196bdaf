// shearsparse command line: run experiments, summarize manifests, check
// generators, dump atoms.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shearsparse/decay_conditions.hpp"
#include "shearsparse/experiment.hpp"
#include "shearsparse/io.hpp"
#include "shearsparse/scene.hpp"
#include "shearsparse/system.hpp"

namespace fs = std::filesystem;
using namespace shearsparse;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigInvalid: return 2;
    case ErrorKind::ExperimentFailed: return 3;
    case ErrorKind::ConditionViolated: return 3;
    case ErrorKind::ManifestCorrupt: return 4;
    default: return 1;
  }
}

// One "key=value" record per line on stderr, values quoted.
int report(const Error& e) {
  std::string msg = e.what();
  for (char& ch : msg)
    if (ch == '\n' || ch == '"') ch = '\'';
  std::cerr << "error kind=" << to_string(e.kind());
  if (!e.field().empty()) std::cerr << " field=" << e.field();
  std::cerr << " message=\"" << msg << "\"\n";
  return exit_code(e.kind());
}

Cone parse_cone(const std::string& s) {
  if (s == "horizontal" || s == "h") return Cone::horizontal;
  if (s == "vertical" || s == "v") return Cone::vertical;
  if (s == "coarse" || s == "c") return Cone::coarse;
  fail(ErrorKind::InvalidArgument, "unknown cone '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shearsparse: compactly supported shearlet experiments"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> sets;
  unsigned workers = 1;
  auto* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", config, "experiment config file")->required();
  run->add_option("--set", sets, "override a config key (key=value)")->take_all();
  run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> manifests;
  std::string csv_out;
  auto* summ = app.add_subcommand("summarize", "join experiment manifests into one table");
  summ->add_option("manifests", manifests, "manifest files");
  summ->add_option("--csv", csv_out, "also write the table as CSV");

  std::string spec_path;
  double extent = 64;
  std::size_t samples = 513;
  std::string report_out;
  auto* verify = app.add_subcommand("verify-generators", "check the Fourier decay conditions of a generator spec");
  verify->add_option("spec", spec_path, "generator spec file")->required();
  verify->add_option("--extent", extent, "frequency extent (>= 64)");
  verify->add_option("--samples", samples, "frequency samples per axis");
  verify->add_option("--out", report_out, "write the report CSV here");

  int j = 0, k = 0, J = -1;
  long long m1 = 0, m2 = 0;
  std::string cone = "horizontal", dump_dir = ".";
  auto* dump = app.add_subcommand("dump-atoms", "write one atom tabulation");
  dump->add_option("spec", spec_path, "generator spec file")->required();
  dump->add_option("--j", j, "scale")->required();
  dump->add_option("--k", k, "shear")->required();
  dump->add_option("--cone", cone, "horizontal | vertical | coarse");
  dump->add_option("--m1", m1, "translation m1");
  dump->add_option("--m2", m2, "translation m2");
  dump->add_option("--J", J, "system depth (defaults to j)");
  dump->add_option("--out", dump_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config, sets);
      RunOptions opt;
      opt.workers = workers;
      if (const char* env = std::getenv("SHEARSPARSE_OUT"); env && *env) opt.output_override = env;
      const RunResult r = run_experiment(cfg, opt);
      std::cout << r.manifest.string() << '\n';
      for (const auto& [name, value] : r.metrics) std::cout << "  " << name << " = " << num(value) << '\n';
      return 0;
    }
    if (*summ) {
      std::vector<fs::path> paths(manifests.begin(), manifests.end());
      const SummaryTable t = summarize(paths);
      std::cout << t.text();
      if (!csv_out.empty()) write_file(csv_out, t.csv());
      return 0;
    }
    if (*verify) {
      const GeneratorSpec spec = load_generator(spec_path);
      const DecayReport rep = verify_decay_conditions(spec, extent, samples);
      const std::string csv = rep.to_csv();
      std::cout << csv;
      if (!report_out.empty()) write_file(report_out, csv);
      require_decay_conditions(rep);
      return 0;
    }
    if (*dump) {
      auto spec = std::make_shared<GeneratorSpec>(load_generator(spec_path));
      const ShearletSystem sys(spec, SystemConfig{1.0, J < 0 ? j : J, 0});
      const ShearletIndex idx{parse_cone(cone), j, k, m1, m2};
      const AtomTabulation t = atom(sys, idx);
      Grid g(t.side);
      std::copy(t.values.begin(), t.values.end(), g.values().begin());
      fs::create_directories(dump_dir);
      const std::string stem = std::string("atom_") + to_string(idx.cone) + "_j" + std::to_string(j) + "_k" +
                               std::to_string(k) + "_m" + std::to_string(m1) + "_" + std::to_string(m2);
      write_file(fs::path(dump_dir) / (stem + ".raw"), encode_grid_raw(g));
      write_file(fs::path(dump_dir) / (stem + ".pgm"), encode_pgm16(g));
      const Box b = t.bounding_box;
      std::cout << stem << ": " << t.side << "x" << t.side << " samples, norm " << num(t.norm_l2()) << ", support box ["
                << num(b.lo1) << ", " << num(b.hi1) << "] x [" << num(b.lo2) << ", " << num(b.hi2) << "]\n";
      return 0;
    }
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error kind=Unknown message=\"" << e.what() << "\"\n";
    return 1;
  }
  return 0;
}
