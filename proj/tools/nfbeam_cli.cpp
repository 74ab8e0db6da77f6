#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nfbeam/analytics.hpp"
#include "nfbeam/channel.hpp"
#include "nfbeam/em_core.hpp"
#include "nfbeam/errors.hpp"
#include "nfbeam/experiment.hpp"
#include "nfbeam/format.hpp"
#include "nfbeam/geometry.hpp"
#include "nfbeam/optimizer.hpp"
#include "nfbeam/validation.hpp"

namespace fs = std::filesystem;
using namespace nfbeam;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string coupling;
  int threads = -1;
  bool dump_dipoles = false;
  std::vector<double> radii;
};

ExperimentConfig load(const Options& opt) {
  ExperimentConfig cfg = opt.config_path.empty() ? ExperimentConfig{} : parse_config_file(opt.config_path);
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (!opt.coupling.empty()) cfg.coupling = opt.coupling == "on";
  if (opt.threads >= 0) cfg.threads = opt.threads;
  if (opt.dump_dipoles) cfg.dump_dipoles = true;
  if (!opt.radii.empty()) cfg.aperture_radii = opt.radii;
  validate(cfg);
  return cfg;
}

fs::path output_file(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return fs::path(cfg.output_dir) / name;
}

void save(const ResultTable& table, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  table.write_csv(out, utc_timestamp());
  std::cout << "wrote " << path.string() << '\n';
}

int gain_sweep(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const ResultTable table = run_gain_vs_d(cfg);
  for (const std::string& m : table.metadata) {
    if (m.rfind("failed", 0) == 0) std::cerr << m << '\n';
  }
  const std::size_t d = table.column("D");
  const std::size_t n = table.column("N");
  const std::size_t ga = table.column("G_analytic");
  const std::size_t gs = table.column("G_sim_nocoupling");
  for (const auto& row : table.rows) {
    std::cout << "D=" << format_double(row[d]) << " m N=" << format_double(row[n])
              << " G_analytic=" << format_double(row[ga]) << " G_sim=" << format_double(row[gs]) << '\n';
  }
  save(table, output_file(cfg, "gain_vs_D.csv"));
  return table.rows.size() == cfg.aperture_radii.size() ? 0 : kExitNumerical;
}

int beam_depth(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const BeamDepthRun run = run_beamdepth(cfg);
  save(run.curve, output_file(cfg, "beam_depth.csv"));
  save(run.summary, output_file(cfg, "beam_depth_limits.csv"));

  // On-axis field of the analytic-phase aperture across the same offsets.
  const PhysicalConstants c = cfg.constants();
  const ApertureLayout layout = build_layout(cfg.beam_depth_radius, c);
  const PhaseConfig phases = analytic_phase(layout, cfg.observation_distance, c);
  const DipoleSolution sol =
      solve_dipoles(PolarizabilitySet::from_phases(phases.phases, radiation_damping(c)), Coupling::none(),
                    excitation_field(layout, c), c.feed_current);
  std::vector<Point3> points;
  for (double dr : cfg.delta_r) points.push_back({0.0, 0.0, cfg.observation_distance + dr});
  const std::vector<FieldSample> fields = field_grid(layout, sol.moments, points, c);
  const fs::path grid = output_file(cfg, "field_grid.csv");
  std::ofstream out(grid);
  write_field_grid_csv(out, points, fields);
  std::cout << "wrote " << grid.string() << '\n';

  const std::size_t kappa = run.summary.column("kappa");
  const std::size_t rlim = run.summary.column("r_limit");
  const std::size_t lo = run.summary.column("delta_r_minus");
  const std::size_t hi = run.summary.column("delta_r_plus");
  for (const auto& row : run.summary.rows) {
    std::cout << "kappa=" << format_double(row[kappa]) << " dR-=" << format_double(row[lo])
              << " dR+=" << format_double(row[hi]) << " R_lim=" << format_double(row[rlim]) << '\n';
  }
  return 0;
}

int layout(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const PhysicalConstants c = cfg.constants();
  for (double radius : cfg.aperture_radii) {
    const ApertureLayout l = build_layout(radius, c);
    std::cout << "D=" << format_double(radius) << " m N=" << l.size() << '\n';
    std::ofstream out(output_file(cfg, "layout_D" + format_double(radius) + ".csv"));
    write_layout_csv(out, l);
  }
  return 0;
}

int selfcheck() {
  bool ok = true;
  for (const auto& r : validation::run_acceptance_suite()) {
    std::cout << validation::format_result(r) << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field focusing simulator for waveguide-fed metasurface apertures"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out_dir, "output directory (overrides output_dir)");
  app.add_option("--coupling", opt.coupling, "mutual coupling in the simulation")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--threads", opt.threads, "worker threads, 0 for the OpenMP default")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--dump-dipoles", opt.dump_dipoles, "write per-element moments and local fields");

  auto* sweep = app.add_subcommand("gain-sweep", "realized gain against aperture radius");
  auto* depth = app.add_subcommand("beam-depth", "beam-depth curve and limits");
  auto* lay = app.add_subcommand("layout", "element positions for each aperture radius");
  lay->add_option("--radius", opt.radii, "aperture radius in m (repeatable)");
  auto* check = app.add_subcommand("selfcheck", "run the acceptance and invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sweep) return gain_sweep(opt);
    if (*depth) return beam_depth(opt);
    if (*lay) return layout(opt);
    if (*check) return selfcheck();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
