#include "nfbeam/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <omp.h>

#include "nfbeam/analytics.hpp"
#include "nfbeam/channel.hpp"
#include "nfbeam/em_core.hpp"
#include "nfbeam/errors.hpp"
#include "nfbeam/format.hpp"

namespace nfbeam {

namespace {

std::vector<double> linspace(double start, double stop, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
  }
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& text, const std::string& key, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a number, got '" + text + "'",
                      key, line);
  }
  return v;
}

long long parse_integer(const std::string& text, const std::string& key, int line) {
  long long v = 0;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects an integer, got '" + text + "'",
                      key, line);
  }
  return v;
}

bool parse_switch(const std::string& text, const std::string& key, int line) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects on/off, got '" + text + "'", key,
                    line);
}

std::vector<double> parse_list(const std::string& text, const std::string& key, int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_real(trim(item), key, line));
  }
  if (out.empty()) {
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' needs at least one value", key, line);
  }
  return out;
}

// "start:stop:count" or a comma list.
std::vector<double> parse_grid(const std::string& text, const std::string& key, int line) {
  if (text.find(':') == std::string::npos) return parse_list(text, key, line);
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' grid must be start:stop:count", key,
                      line);
  }
  const long long count = parse_integer(trim(c), key, line);
  if (count < 1 || count > 10'000'000) {
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' grid count out of range", key, line);
  }
  return linspace(parse_real(trim(a), key, line), parse_real(trim(b), key, line), static_cast<int>(count));
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

// Echo an evenly spaced grid in its compact form.
std::string grid_or_list(const std::vector<double>& v) {
  if (v.size() >= 3 && linspace(v.front(), v.back(), static_cast<int>(v.size())) == v) {
    return format_double(v.front()) + ":" + format_double(v.back()) + ":" + std::to_string(v.size());
  }
  return join(v);
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError("invalid '" + field + "': " + message, field);
}

struct ThreadScope {
  explicit ThreadScope(int threads) : previous(omp_get_max_threads()) {
    if (threads > 0) omp_set_num_threads(threads);
  }
  ~ThreadScope() { omp_set_num_threads(previous); }
  int previous;
};

void append_config(ResultTable& table, const ExperimentConfig& config) {
  table.metadata.push_back("nfbeam " + std::string(kToolVersion));
  for (const std::string& line : describe(config)) table.metadata.push_back("config " + line);
}

}  // namespace

ExperimentConfig::ExperimentConfig() : delta_r(linspace(0.0, 10.0, 200)) {}

PhysicalConstants ExperimentConfig::constants() const {
  return PhysicalConstants::make(frequency, waveguide_height, light_speed, Complex{feed_current, 0.0});
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&, int)>;
  const std::map<std::string, Setter> setters = {
      {"frequency", [&](auto& v, auto& k, int l) { cfg.frequency = parse_real(v, k, l); }},
      {"waveguide_height", [&](auto& v, auto& k, int l) { cfg.waveguide_height = parse_real(v, k, l); }},
      {"light_speed", [&](auto& v, auto& k, int l) { cfg.light_speed = parse_real(v, k, l); }},
      {"feed_current", [&](auto& v, auto& k, int l) { cfg.feed_current = parse_real(v, k, l); }},
      {"aperture_radii", [&](auto& v, auto& k, int l) { cfg.aperture_radii = parse_list(v, k, l); }},
      {"observation_distance", [&](auto& v, auto& k, int l) { cfg.observation_distance = parse_real(v, k, l); }},
      {"beam_depth_radius", [&](auto& v, auto& k, int l) { cfg.beam_depth_radius = parse_real(v, k, l); }},
      {"delta_r", [&](auto& v, auto& k, int l) { cfg.delta_r = parse_grid(v, k, l); }},
      {"kappa", [&](auto& v, auto& k, int l) { cfg.kappa = parse_list(v, k, l); }},
      {"coupling", [&](auto& v, auto& k, int l) { cfg.coupling = parse_switch(v, k, l); }},
      {"optimizer_max_iters",
       [&](auto& v, auto& k, int l) { cfg.optimizer_max_iters = static_cast<int>(parse_integer(v, k, l)); }},
      {"optimizer_grad_tol", [&](auto& v, auto& k, int l) { cfg.optimizer_grad_tol = parse_real(v, k, l); }},
      {"optimizer_init",
       [&](auto& v, auto& k, int l) {
         if (v == "analytic") {
           cfg.optimizer_init = PhaseInit::Analytic;
         } else if (v == "random") {
           cfg.optimizer_init = PhaseInit::Random;
         } else {
           throw ConfigError("line " + std::to_string(l) + ": '" + k + "' expects analytic or random", k, l);
         }
       }},
      {"seed", [&](auto& v, auto& k, int l) { cfg.seed = static_cast<std::uint64_t>(parse_integer(v, k, l)); }},
      {"output_dir", [&](auto& v, auto&, int) { cfg.output_dir = v; }},
      {"threads", [&](auto& v, auto& k, int l) { cfg.threads = static_cast<int>(parse_integer(v, k, l)); }},
      {"dump_dipoles", [&](auto& v, auto& k, int l) { cfg.dump_dipoles = parse_switch(v, k, l); }},
  };

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", "", line);
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", key, line);
    }
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line) + ": '" + key + "' has no value", key, line);
    }
    it->second(value, key, line);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string(), "");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate(const ExperimentConfig& c) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  require(positive(c.frequency), "frequency", "must be positive");
  require(positive(c.waveguide_height), "waveguide_height", "must be positive");
  require(positive(c.light_speed), "light_speed", "must be positive");
  require(c.feed_current != 0.0 && std::isfinite(c.feed_current), "feed_current", "must be nonzero");
  require(!c.aperture_radii.empty(), "aperture_radii", "must not be empty");
  for (double d : c.aperture_radii) require(positive(d), "aperture_radii", "radii must be positive");
  require(positive(c.observation_distance), "observation_distance", "must be positive");
  require(positive(c.beam_depth_radius), "beam_depth_radius", "must be positive");
  require(!c.delta_r.empty(), "delta_r", "must not be empty");
  for (double dr : c.delta_r) {
    require(std::isfinite(dr), "delta_r", "offsets must be finite");
    require(c.observation_distance + dr > 0.0, "delta_r",
            "focus behind the aperture (observation_distance + delta_r <= 0)");
  }
  for (double k : c.kappa) require(k > 0.0 && k <= 1.0, "kappa", "levels must lie in (0, 1]");
  require(c.optimizer_max_iters >= 1, "optimizer_max_iters", "must be at least 1");
  require(c.optimizer_grad_tol >= 0.0, "optimizer_grad_tol", "must be non-negative");
  require(c.threads >= 0, "threads", "must be non-negative");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
}

std::vector<std::string> describe(const ExperimentConfig& c) {
  return {
      "frequency=" + format_double(c.frequency),
      "waveguide_height=" + format_double(c.waveguide_height),
      "light_speed=" + format_double(c.light_speed),
      "feed_current=" + format_double(c.feed_current),
      "aperture_radii=" + join(c.aperture_radii),
      "observation_distance=" + format_double(c.observation_distance),
      "beam_depth_radius=" + format_double(c.beam_depth_radius),
      "delta_r=" + grid_or_list(c.delta_r),
      "kappa=" + join(c.kappa),
      std::string("coupling=") + (c.coupling ? "on" : "off"),
      "optimizer_max_iters=" + std::to_string(c.optimizer_max_iters),
      "optimizer_grad_tol=" + format_double(c.optimizer_grad_tol),
      std::string("optimizer_init=") + (c.optimizer_init == PhaseInit::Analytic ? "analytic" : "random"),
      "seed=" + std::to_string(c.seed),
      "output_dir=" + c.output_dir,
      std::string("dump_dipoles=") + (c.dump_dipoles ? "on" : "off"),
  };
}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("row width does not match the column count");
  }
  for (double v : row) {
    if (std::isnan(v)) throw NumericalError("refusing to emit a NaN row");
  }
  rows.push_back(std::move(row));
}

std::size_t ResultTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

void ResultTable::write_csv(std::ostream& out, const std::optional<std::string>& timestamp) const {
  if (timestamp) out << "# generated " << *timestamp << '\n';
  for (const std::string& m : metadata) out << "# " << m << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

ResultTable run_gain_vs_d(const ExperimentConfig& config) {
  validate(config);
  const PhysicalConstants constants = config.constants();
  const RadiationDamping damping = radiation_damping(constants);
  const double distance = config.observation_distance;
  const Point3 focus{0.0, 0.0, distance};

  ResultTable table;
  append_config(table, config);
  table.columns = {"D", "N", "nu", "G_analytic", "G_sim_nocoupling"};
  if (config.coupling) {
    table.columns.insert(table.columns.end(), {"G_sim_coupled", "G_sim_coupled_p0", "rmo_objective_initial",
                                               "rmo_objective_final", "rmo_iterations"});
  }

  struct Outcome {
    std::vector<double> row;
    std::string failure;
  };
  std::vector<double> radii = config.aperture_radii;
  std::sort(radii.begin(), radii.end());
  std::vector<Outcome> outcomes(radii.size());

  auto evaluate = [&](std::size_t index) {
    const double radius = radii[index];
    const ApertureLayout layout = build_layout(radius, constants);
    const double density = surface_density(layout);
    const Eigen::VectorXcd hf = excitation_field(layout, constants);

    const PhaseConfig analytic = analytic_phase(layout, distance, constants);
    const PolarizabilitySet polar = PolarizabilitySet::from_phases(analytic.phases, damping);
    const DipoleSolution free = solve_dipoles(polar, Coupling::none(), hf, constants.feed_current);
    const FieldSample e_free = scattered_field(layout, free.moments, focus, constants);
    const double p_free = supplied_power(free.moments, free.local_field, constants);

    std::vector<double> row = {radius,
                               static_cast<double>(layout.size()),
                               density,
                               analytic_gain(distance, radius, density, constants, damping),
                               realized_gain(e_free, p_free)};
    if (config.coupling) {
      FocusingProblem problem(layout, constants, Coupling::from_layout(layout, constants), focus);
      PhaseConfig init = analytic;
      if (config.optimizer_init == PhaseInit::Random) {
        std::mt19937_64 rng(config.seed + index);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        for (double& p : init.phases) p = angle(rng);
      }
      RmoOptions options;
      options.max_iters = config.optimizer_max_iters;
      options.grad_tol = config.optimizer_grad_tol;
      const RmoResult rmo = rmo_optimize(init, problem, options);

      const PolarizabilitySet tuned = PolarizabilitySet::from_phases(rmo.phases.phases, damping);
      const DipoleSolution coupled = solve_dipoles(tuned, problem.coupling(), hf, constants.feed_current);
      const FieldSample e_coupled = scattered_field(layout, coupled.moments, focus, constants);
      const double p_coupled = supplied_power(coupled.moments, coupled.local_field, constants);
      const DipoleSolution uncoupled = solve_dipoles(tuned, Coupling::none(), hf, constants.feed_current);
      const double p_uncoupled = supplied_power(uncoupled.moments, uncoupled.local_field, constants);
      row.insert(row.end(), {realized_gain(e_coupled, p_coupled), realized_gain(e_coupled, p_uncoupled),
                             rmo.trace.objective.front(), rmo.trace.objective.back(),
                             static_cast<double>(rmo.trace.iterations)});

      std::filesystem::create_directories(config.output_dir);
      std::ofstream trace(std::filesystem::path(config.output_dir) /
                          ("rmo_trace_D" + format_double(radius) + ".csv"));
      write_trace_csv(trace, rmo.trace);
      if (config.dump_dipoles) {
        std::ofstream dump(std::filesystem::path(config.output_dir) /
                           ("dipoles_D" + format_double(radius) + ".csv"));
        write_dipoles_csv(dump, coupled);
      }
    } else if (config.dump_dipoles) {
      std::filesystem::create_directories(config.output_dir);
      std::ofstream dump(std::filesystem::path(config.output_dir) /
                         ("dipoles_D" + format_double(radius) + ".csv"));
      write_dipoles_csv(dump, free);
    }
    return row;
  };

  {
    ThreadScope scope(config.threads);
    const auto count = static_cast<std::ptrdiff_t>(radii.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        outcomes[i].row = evaluate(static_cast<std::size_t>(i));
      } catch (const std::exception& e) {
        outcomes[i].failure = e.what();
      }
    }
  }

  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!outcomes[i].failure.empty()) {
      table.metadata.push_back("failed D=" + format_double(radii[i]) + ": " + outcomes[i].failure);
      continue;
    }
    table.add_row(std::move(outcomes[i].row));
  }
  return table;
}

BeamDepthRun run_beamdepth(const ExperimentConfig& config) {
  validate(config);
  const PhysicalConstants constants = config.constants();
  const double radius = config.beam_depth_radius;
  const double distance = config.observation_distance;
  const double k = constants.wavenumber;
  const ApertureLayout layout = build_layout(radius, constants);

  BeamDepthRun run;
  append_config(run.curve, config);
  run.curve.metadata.push_back("layout N=" + std::to_string(layout.size()));
  run.curve.columns = {"delta_r", "alpha", "G_analytic", "G_discrete"};

  std::vector<double> offsets = config.delta_r;
  std::sort(offsets.begin(), offsets.end());
  const std::vector<double> discrete = discrete_beamdepth_curve(layout, distance, offsets, constants);
  std::vector<double> alpha(offsets.size());
  std::vector<double> analytic(offsets.size());
  {
    ThreadScope scope(config.threads);
    const auto count = static_cast<std::ptrdiff_t>(offsets.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      alpha[i] = alpha_of_offset(offsets[i], distance, radius, k);
      analytic[i] = beamdepth_gain(alpha[i]);
    }
  }
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    run.curve.add_row({offsets[i], alpha[i], analytic[i], discrete[i]});
  }

  append_config(run.summary, config);
  run.summary.columns = {"kappa", "alpha_kappa", "delta_r_minus", "delta_r_plus", "r_limit"};
  std::vector<double> levels = config.kappa;
  std::sort(levels.begin(), levels.end());
  for (double kappa : levels) {
    const BeamDepthInterval limits = beamdepth_limits(kappa, distance, radius, k);
    run.summary.add_row({kappa, alpha_for_level(kappa), limits.lower, limits.upper.as_double(),
                         r_limit(kappa, radius, k).as_double()});
  }
  return run;
}

ResultTable layout_summary(const ExperimentConfig& config) {
  const PhysicalConstants constants = config.constants();
  ResultTable table;
  append_config(table, config);
  table.columns = {"D", "N", "rings", "nu"};
  for (double radius : config.aperture_radii) {
    const ApertureLayout layout = build_layout(radius, constants);
    const auto rings = layout.ring_index();
    table.add_row({radius, static_cast<double>(layout.size()),
                   static_cast<double>(*std::max_element(rings.begin(), rings.end())),
                   surface_density(layout)});
  }
  return table;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace nfbeam
