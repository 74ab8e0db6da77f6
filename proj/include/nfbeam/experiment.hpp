#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nfbeam/geometry.hpp"
#include "nfbeam/optimizer.hpp"

namespace nfbeam {

inline constexpr const char* kToolVersion = "0.3.1";

enum class PhaseInit { Analytic, Random };

struct ExperimentConfig {
  double frequency = 10e9;
  double waveguide_height = 2e-3;
  double light_speed = kSpeedOfLight;
  double feed_current = 1.0;
  std::vector<double> aperture_radii = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  double observation_distance = 1.0;
  double beam_depth_radius = 0.2;
  std::vector<double> delta_r;  // filled with 200 points on [0, 10] m by default
  std::vector<double> kappa = {0.15, 0.5};
  bool coupling = false;
  int optimizer_max_iters = 500;
  double optimizer_grad_tol = 1e-8;
  PhaseInit optimizer_init = PhaseInit::Analytic;
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  int threads = 0;  // 0: OpenMP default
  bool dump_dipoles = false;

  ExperimentConfig();

  PhysicalConstants constants() const;
};

/// Flat `key = value` text, '#' comments. Unknown keys and malformed lines
/// raise ConfigError carrying the line number; the result is validated.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Throws ConfigError naming the first offending field.
void validate(const ExperimentConfig& config);

/// Echo of every key in config-file syntax, one entry per line.
std::vector<std::string> describe(const ExperimentConfig& config);

/// Named real columns with a '#'-prefixed metadata header.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> metadata;

  void add_row(std::vector<double> row);
  std::size_t column(const std::string& name) const;
  /// Timestamp line is omitted when `timestamp` is empty.
  void write_csv(std::ostream& out, const std::optional<std::string>& timestamp) const;
};

ResultTable run_gain_vs_d(const ExperimentConfig& config);

struct BeamDepthRun {
  ResultTable curve;    // delta_r, alpha, G_analytic, G_discrete
  ResultTable summary;  // kappa, alpha_kappa, delta_r_minus, delta_r_plus, r_limit
};

BeamDepthRun run_beamdepth(const ExperimentConfig& config);

ResultTable layout_summary(const ExperimentConfig& config);

std::string utc_timestamp();

}  // namespace nfbeam
