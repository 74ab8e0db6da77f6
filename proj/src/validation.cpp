#include "nfbeam/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nfbeam/analytics.hpp"
#include "nfbeam/channel.hpp"
#include "nfbeam/em_core.hpp"
#include "nfbeam/format.hpp"
#include "nfbeam/geometry.hpp"
#include "nfbeam/optimizer.hpp"

namespace nfbeam::validation {

namespace {

const PhysicalConstants& reference_constants() {
  static const PhysicalConstants c = PhysicalConstants::make(10e9, 2e-3);
  return c;
}

struct Uncoupled {
  std::size_t elements;
  FieldSample field;
  double power;
};

// Analytic focusing phases at (0, 0, R), no mutual coupling.
Uncoupled simulate_uncoupled(double radius, double distance) {
  const PhysicalConstants& c = reference_constants();
  const ApertureLayout layout = build_layout(radius, c);
  const PhaseConfig phases = analytic_phase(layout, distance, c);
  const PolarizabilitySet polar = PolarizabilitySet::from_phases(phases.phases, radiation_damping(c));
  const DipoleSolution sol = solve_dipoles(polar, Coupling::none(), excitation_field(layout, c), c.feed_current);
  return {layout.size(), scattered_field(layout, sol.moments, {0.0, 0.0, distance}, c),
          supplied_power(sol.moments, sol.local_field, c)};
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

std::string num(double v) { return format_double(v); }

// Shared by criteria 6 and 7.
struct ScalingSweep {
  std::vector<double> counts;
  std::vector<double> field_sq;
  std::vector<double> gain;
};

ScalingSweep scaling_sweep() {
  ScalingSweep s;
  for (double d : {0.02, 0.04, 0.06, 0.08}) {
    const Uncoupled u = simulate_uncoupled(d, 5.0);
    s.counts.push_back(static_cast<double>(u.elements));
    s.field_sq.push_back(std::norm(u.field.theta));
    s.gain.push_back(realized_gain(u.field, u.power));
  }
  return s;
}

ApertureLayout small_layout(std::size_t count) {
  const ApertureLayout base = build_layout(0.05, reference_constants());
  std::vector<Point2> pts(base.positions().begin(), base.positions().begin() + static_cast<long>(count));
  return ApertureLayout::from_positions(std::move(pts), base.radius());
}

CheckResult make(int id, std::string name, double budget, bool passed, std::string detail) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  r.budget_seconds = budget;
  r.passed = passed;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

CheckResult check_element_counts() {
  const auto& c = reference_constants();
  const std::size_t n1 = build_layout(0.05, c).size();
  const std::size_t n2 = build_layout(0.4, c).size();
  return make(1, "element counts", 1.0, n1 == 38 && n2 == 2206,
              "N(0.05 m)=" + std::to_string(n1) + " N(0.4 m)=" + std::to_string(n2) + " expected 38, 2206");
}

CheckResult check_beamdepth_normalization() {
  const double g0 = beamdepth_gain(0.0);
  return make(2, "beam-depth normalization", 1.0, std::abs(g0 - 1.0) <= 1e-12,
              "G(0)=" + num(g0) + " tol 1e-12");
}

CheckResult check_far_field_transition() {
  const double k = reference_constants().wavenumber;
  const double alpha = alpha_for_level(0.15);
  const double rlim = r_limit(0.15, 0.2, k).value();
  return make(3, "far-field transition", 1.0, std::abs(rlim - 1.0) <= 0.02,
              "alpha_0.15=" + num(alpha) + " R_lim=" + num(rlim) + " m, target 1 m +-2%");
}

CheckResult check_beamdepth_asymptote() {
  const auto& c = reference_constants();
  const ApertureLayout layout = build_layout(0.2, c);
  const double g = discrete_beamdepth_gain(layout, 1.0, 1e3, c);
  return make(4, "beam-depth asymptote", 30.0, std::abs(g - 0.15) <= 0.02,
              "G_discrete(dR=1000 m)=" + num(g) + " target 0.15 +-0.02");
}

CheckResult check_beamdepth_agreement() {
  const auto& c = reference_constants();
  const ApertureLayout layout = build_layout(0.2, c);
  const std::vector<double> offsets = linspace(0.0, 10.0, 200);
  const std::vector<double> discrete = discrete_beamdepth_curve(layout, 1.0, offsets, c);
  double worst = 0.0;
  double at = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double a = beamdepth_gain(alpha_of_offset(offsets[i], 1.0, 0.2, c.wavenumber));
    const double dev = std::abs(a - discrete[i]);
    if (dev > worst) {
      worst = dev;
      at = offsets[i];
    }
  }
  return make(5, "analytic vs discrete beam depth", 60.0, worst <= 0.03,
              "max |dG|=" + num(worst) + " at dR=" + num(at) + " m, tol 0.03");
}

CheckResult check_field_scaling() {
  const ScalingSweep s = scaling_sweep();
  const double slope = loglog_slope(s.counts, s.field_sq);
  return make(6, "fixed-current field scaling", 60.0, slope >= 1.4 && slope <= 1.6,
              "slope |e_theta|^2 vs N = " + num(slope) + ", band [1.4, 1.6]");
}

CheckResult check_gain_scaling() {
  const ScalingSweep s = scaling_sweep();
  const double slope = loglog_slope(s.counts, s.gain);
  return make(7, "power-normalized gain scaling", 60.0, slope >= 0.9 && slope <= 1.1,
              "slope G vs N = " + num(slope) + ", band [0.9, 1.1]");
}

CheckResult check_analytic_gain() {
  const auto& c = reference_constants();
  const Uncoupled u = simulate_uncoupled(0.2, 1.0);
  const double sim = realized_gain(u.field, u.power);
  const double density = surface_density(build_layout(0.2, c));
  const double ana = analytic_gain(1.0, 0.2, density, c, radiation_damping(c));
  const double rel = std::abs(sim - ana) / ana;
  return make(8, "analytic gain agreement", 30.0, rel <= 0.25,
              "G_sim=" + num(sim) + " G_analytic=" + num(ana) + " rel dev " + num(rel) + ", tol 0.25");
}

CheckResult check_cross_polarization() {
  const Uncoupled u = simulate_uncoupled(0.2, 1.0);
  const double ratio = std::norm(u.field.phi) / std::norm(u.field.theta);
  return make(9, "cross-polarization nulling", 30.0, ratio <= 0.05,
              "|e_phi|^2/|e_theta|^2=" + num(ratio) + ", tol 0.05");
}

CheckResult check_onaxis_equivalence() {
  const auto& c = reference_constants();
  const ApertureLayout layout = build_layout(0.2, c);
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> dist(0.3, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXcd m(static_cast<Eigen::Index>(2 * layout.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) m[i] = Complex(gauss(rng), gauss(rng));
    const double r = dist(rng);
    const FieldSample general = scattered_field(layout, m, {0.0, 0.0, r}, c);
    const FieldSample closed = onaxis_fields(layout, m, r, c);
    const double scale = std::sqrt(std::norm(closed.theta) + std::norm(closed.phi));
    const double err =
        std::sqrt(std::norm(general.theta - closed.theta) + std::norm(general.phi - closed.phi)) / scale;
    worst = std::max(worst, err);
  }
  return make(10, "on-axis closed-form equivalence", 10.0, worst <= 1e-10,
              "max rel err over 20 moment vectors " + num(worst) + ", tol 1e-10");
}

CheckResult check_property_suites() {
  const auto& c = reference_constants();
  const RadiationDamping damping = radiation_damping(c);
  std::ostringstream detail;
  bool ok = true;

  // Lorentzian passivity on a 64-phase grid (offset by half a step so the
  // A = 0 point at phi = -pi/2 is not sampled).
  double passivity = 0.0;
  bool lossless_sign = true;
  for (int i = 0; i < 64; ++i) {
    const double phi = 2.0 * std::numbers::pi * (i + 0.5) / 64.0;
    const Complex a = lorentzian_polarizability(phi, damping)(0, 0);
    passivity = std::max(passivity, std::abs((1.0 / a).imag() - damping.value) / damping.value);
    lossless_sign = lossless_sign && a.imag() <= 0.0;
  }
  const bool pass_passivity = passivity <= 1e-12 && lossless_sign;
  detail << "passivity " << (pass_passivity ? "ok" : "FAIL") << " (" << num(passivity) << ")";
  ok = ok && pass_passivity;

  // Reciprocity for random element pairs.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-0.2, 0.2);
  double reciprocity = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double x1 = coord(rng), y1 = coord(rng), x2 = coord(rng), y2 = coord(rng);
    const Block2 g12 = coupling_block(x1 - x2, y1 - y2, c);
    const Block2 g21 = coupling_block(x2 - x1, y2 - y1, c);
    reciprocity = std::max(reciprocity, (g12 - g21.transpose()).norm() / g12.norm());
  }
  const bool pass_recip = reciprocity <= 1e-12;
  detail << "; reciprocity " << (pass_recip ? "ok" : "FAIL") << " (" << num(reciprocity) << ")";
  ok = ok && pass_recip;

  // Fixed-point residual of the coupled solve, N = 38.
  {
    const ApertureLayout layout = build_layout(0.05, c);
    const PhaseConfig phases = analytic_phase(layout, 1.0, c);
    const PolarizabilitySet polar = PolarizabilitySet::from_phases(phases.phases, damping);
    const Coupling coupling = Coupling::from_layout(layout, c);
    const Eigen::VectorXcd h0 = excitation_field(layout, c) * c.feed_current;
    const DipoleSolution sol = solve_dipoles(polar, coupling, excitation_field(layout, c), c.feed_current);
    Eigen::VectorXcd rhs = h0 + coupling.matrix() * sol.moments;
    Eigen::VectorXcd am(rhs.size());
    for (std::size_t n = 0; n < layout.size(); ++n) {
      am.segment<2>(static_cast<Eigen::Index>(2 * n)) =
          polar.block(n) * rhs.segment<2>(static_cast<Eigen::Index>(2 * n));
    }
    const double residual = (sol.moments - am).norm() / sol.moments.norm();
    const bool pass = residual <= 1e-9;
    detail << "; fixed point " << (pass ? "ok" : "FAIL") << " (" << num(residual) << ")";
    ok = ok && pass;
  }

  // Adjoint gradient vs central differences, N = 20, coupled.
  const ApertureLayout small = small_layout(20);
  const FocusingProblem problem(small, c, Coupling::from_layout(small, c), {0.0, 0.0, 1.0});
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> phases(small.size());
  for (double& p : phases) p = angle(rng);
  {
    const ObjectiveValue ov = problem.evaluate(phases);
    const double h = 1e-6;
    double gmax = 0.0;
    double err = 0.0;
    for (std::size_t n = 0; n < phases.size(); ++n) {
      std::vector<double> plus = phases, minus = phases;
      plus[n] += h;
      minus[n] -= h;
      const double fd = (problem.value(plus) - problem.value(minus)) / (2.0 * h);
      err = std::max(err, std::abs(fd - ov.gradient[n]));
      gmax = std::max(gmax, std::abs(ov.gradient[n]));
    }
    const double rel = err / gmax;
    const bool pass = rel <= 1e-6;
    detail << "; gradient " << (pass ? "ok" : "FAIL") << " (" << num(rel) << ")";
    ok = ok && pass;
  }

  // Optimizer monotonicity from the same random start.
  {
    RmoOptions options;
    options.max_iters = 100;
    const RmoResult result = rmo_optimize(PhaseConfig{phases}, problem, options);
    const auto& obj = result.trace.objective;
    const bool monotone = std::is_sorted(obj.begin(), obj.end());
    const bool pass = monotone && result.trace.max_modulus_deviation <= 1e-12;
    detail << "; optimizer monotone " << (pass ? "ok" : "FAIL") << " (" << result.trace.iterations
           << " iters)";
    ok = ok && pass;
  }

  // Fresnel identity alpha(dR^{+-}) = +-alpha_kappa.
  {
    double worst = 0.0;
    for (double kappa : {0.15, 0.5, 0.9}) {
      const double ak = alpha_for_level(kappa);
      for (double r : {0.3, 0.5, 0.8}) {
        const BeamDepthInterval lim = beamdepth_limits(kappa, r, 0.2, c.wavenumber);
        worst = std::max(worst, std::abs(alpha_of_offset(lim.lower, r, 0.2, c.wavenumber) + ak));
        if (!lim.upper.is_unbounded()) {
          worst = std::max(worst, std::abs(alpha_of_offset(lim.upper.value(), r, 0.2, c.wavenumber) - ak));
        }
      }
    }
    const bool pass = worst <= 1e-12;
    detail << "; Fresnel identity " << (pass ? "ok" : "FAIL") << " (" << num(worst) << ")";
    ok = ok && pass;
  }
  return make(11, "property suites", 120.0, ok, detail.str());
}

std::vector<CheckResult> run_acceptance_suite() {
  using Check = CheckResult (*)();
  struct Entry {
    int id;
    const char* name;
    double budget;
    Check fn;
  };
  const Entry entries[] = {
      {1, "element counts", 1.0, check_element_counts},
      {2, "beam-depth normalization", 1.0, check_beamdepth_normalization},
      {3, "far-field transition", 1.0, check_far_field_transition},
      {4, "beam-depth asymptote", 30.0, check_beamdepth_asymptote},
      {5, "analytic vs discrete beam depth", 60.0, check_beamdepth_agreement},
      {6, "fixed-current field scaling", 60.0, check_field_scaling},
      {7, "power-normalized gain scaling", 60.0, check_gain_scaling},
      {8, "analytic gain agreement", 30.0, check_analytic_gain},
      {9, "cross-polarization nulling", 30.0, check_cross_polarization},
      {10, "on-axis closed-form equivalence", 10.0, check_onaxis_equivalence},
      {11, "property suites", 120.0, check_property_suites},
  };
  std::vector<CheckResult> results;
  for (const Entry& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = e.fn();
    } catch (const std::exception& ex) {
      r = make(e.id, e.name, e.budget, false, std::string("threw: ") + ex.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.budget_seconds) {
      r.passed = false;
      r.detail += "; over runtime budget of " + num(r.budget_seconds) + " s";
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CheckResult& r) {
  std::ostringstream out;
  out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << ": " << r.detail << " ("
      << num(std::round(r.seconds * 1000.0) / 1000.0) << " s)";
  return out.str();
}

}  // namespace nfbeam::validation
