#include "nfbeam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "nfbeam/errors.hpp"
#include "nfbeam/format.hpp"

namespace nfbeam {

namespace {

constexpr Complex kJ{0.0, 1.0};

using CVec = std::vector<Complex>;

double inner(const CVec& a, const CVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * b[i]).real();
  return s;
}

// Orthogonal projection onto the tangent space of the unit circles at u.
CVec project(const CVec& v, const CVec& u) {
  CVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i] - (v[i] * std::conj(u[i])).real() * u[i];
  }
  return out;
}

CVec riemannian_gradient(const CVec& u, const std::vector<double>& phase_gradient) {
  CVec g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = kJ * u[i] * phase_gradient[i];
  return g;
}

std::vector<double> phases_of(const CVec& u) {
  std::vector<double> phi(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) phi[i] = wrap_phase(std::arg(u[i]));
  return phi;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double wrap_phase(double phase) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phase, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w -= two_pi;
  return w;
}

PhaseConfig PhaseConfig::wrapped(std::vector<double> raw) {
  for (double& p : raw) p = wrap_phase(p);
  return PhaseConfig{std::move(raw)};
}

PhaseConfig analytic_phase(const ApertureLayout& layout, double distance, const PhysicalConstants& constants) {
  if (!(distance > 0.0)) {
    throw DomainError("focal distance must be positive");
  }
  const Eigen::VectorXcd hf = excitation_field(layout, constants);
  const auto rho = layout.rho();
  std::vector<double> phases(layout.size());
  for (std::size_t n = 0; n < layout.size(); ++n) {
    const double rn = std::sqrt(distance * distance + rho[n] * rho[n]);
    const Complex h0y = hf(2 * n + 1) * constants.feed_current;
    phases[n] = constants.wavenumber * rn - std::arg(h0y);
  }
  return PhaseConfig::wrapped(std::move(phases));
}

FocusingProblem::FocusingProblem(const ApertureLayout& layout, const PhysicalConstants& constants,
                                 Coupling coupling, const Point3& observation)
    : constants_(constants),
      damping_(radiation_damping(constants)),
      coupling_(std::move(coupling)),
      excitation_(excitation_field(layout, constants)) {
  theta_row_ = channel_matrix(layout, observation, constants).row(0).transpose();
}

ObjectiveValue FocusingProblem::evaluate(std::span<const double> phases) const {
  if (phases.size() != size()) {
    throw DomainError("phase vector length does not match the problem size");
  }
  const PolarizabilitySet polar = PolarizabilitySet::from_phases(phases, damping_);
  const DipoleSystem system(polar, coupling_);
  if (!(system.rcond() >= kMinReciprocalCondition)) {
    throw SolverError("coupled dipole system is ill-conditioned (rcond estimate " +
                          std::to_string(system.rcond()) + ")",
                      system.rcond());
  }
  const Eigen::VectorXcd h0 = excitation_ * constants_.feed_current;
  const Eigen::VectorXcd m = system.solve(system.apply_polarizability(h0));
  Eigen::VectorXcd h_loc = h0;
  if (coupling_.enabled()) h_loc.noalias() += coupling_.matrix() * m;

  const Complex s = theta_row_.transpose() * m;
  const Eigen::VectorXcd adjoint = system.solve_transposed(theta_row_);

  ObjectiveValue out{std::norm(s), std::vector<double>(phases.size())};
  const double c = damping_.value;
  for (std::size_t n = 0; n < phases.size(); ++n) {
    // dA_n / dphi_n = -(1/2C) j e^{j phi_n} I_2
    const Complex da = -kJ * std::polar(1.0, phases[n]) / (2.0 * c);
    const Complex sens = adjoint(2 * n) * h_loc(2 * n) + adjoint(2 * n + 1) * h_loc(2 * n + 1);
    out.gradient[n] = 2.0 * (std::conj(s) * da * sens).real();
  }
  return out;
}

double FocusingProblem::value(std::span<const double> phases) const {
  const PolarizabilitySet polar = PolarizabilitySet::from_phases(phases, damping_);
  const DipoleSolution sol = solve_dipoles(polar, coupling_, excitation_, constants_.feed_current);
  const Complex s = theta_row_.transpose() * sol.moments;
  return std::norm(s);
}

ObjectiveValue objective_and_gradient(const PhaseConfig& config, const FocusingProblem& problem) {
  return problem.evaluate(config.phases);
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::GradientTolerance:
      return "gradient-tolerance";
    case Termination::MaxIterations:
      return "max-iterations";
    case Termination::LineSearchFailure:
      return "line-search-failure";
    case Termination::Stagnation:
      return "stagnation";
  }
  return "unknown";
}

RmoResult rmo_optimize(const PhaseConfig& init, const PhaseObjective& objective, const RmoOptions& options) {
  if (options.max_iters < 1) {
    throw DomainError("max_iters must be at least 1");
  }
  const std::size_t n = init.phases.size();
  CVec u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::polar(1.0, init.phases[i]);

  ObjectiveValue current = objective(phases_of(u));
  CVec grad = riemannian_gradient(u, current.gradient);
  CVec direction = grad;
  double grad_norm = norm2(current.gradient);

  RmoResult result;
  result.trace.objective.push_back(current.value);
  result.trace.gradient_norm.push_back(grad_norm);
  result.trace.reason = Termination::MaxIterations;

  double last_step = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    if (grad_norm <= options.grad_tol * std::abs(current.value)) {
      result.trace.reason = Termination::GradientTolerance;
      break;
    }
    double slope = inner(grad, direction);
    if (!(slope > 0.0)) {
      direction = grad;
      slope = inner(grad, grad);
    }
    double max_dir = 0.0;
    for (const Complex& d : direction) max_dir = std::max(max_dir, std::abs(d));
    const double max_step = 0.25 * std::numbers::pi / max_dir;
    double step = std::min(2.0 * last_step, max_step);

    auto retract = [&](double t) {
      CVec v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Complex w = u[i] + t * direction[i];
        v[i] = w / std::abs(w);
        result.trace.max_modulus_deviation =
            std::max(result.trace.max_modulus_deviation, std::abs(std::abs(v[i]) - 1.0));
      }
      return v;
    };

    bool accepted = false;
    CVec candidate(n);
    ObjectiveValue trial;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      candidate = retract(step);
      trial = objective(phases_of(candidate));
      if (trial.value >= current.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.trace.reason = Termination::LineSearchFailure;
      break;
    }

    // One refinement from the quadratic through f(0), f'(0) and f(step);
    // kept only if it improves on the Armijo point.
    const double curvature = trial.value - current.value - slope * step;
    if (curvature < 0.0) {
      const double refined = std::min(-0.5 * slope * step * step / curvature, max_step);
      if (std::abs(refined - step) > 1e-3 * step) {
        CVec alt = retract(refined);
        ObjectiveValue alt_value = objective(phases_of(alt));
        if (alt_value.value > trial.value) {
          candidate = std::move(alt);
          trial = std::move(alt_value);
          step = refined;
        }
      }
    }

    const double gain = trial.value - current.value;
    stagnant = gain <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(current.value) ? stagnant + 1 : 0;

    const CVec new_grad = riemannian_gradient(candidate, trial.gradient);
    const CVec moved_grad = project(grad, candidate);
    const CVec moved_dir = project(direction, candidate);
    CVec diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = new_grad[i] - moved_grad[i];
    const double beta = std::max(0.0, inner(new_grad, diff) / inner(grad, grad));

    for (std::size_t i = 0; i < n; ++i) direction[i] = new_grad[i] + beta * moved_dir[i];
    u = candidate;
    grad = new_grad;
    current = std::move(trial);
    grad_norm = norm2(current.gradient);
    last_step = step;

    result.trace.iterations = iter + 1;
    result.trace.objective.push_back(current.value);
    result.trace.gradient_norm.push_back(grad_norm);
    if (stagnant >= 3) {
      result.trace.reason = Termination::Stagnation;
      break;
    }
  }
  result.phases = PhaseConfig{phases_of(u)};
  return result;
}

RmoResult rmo_optimize(const PhaseConfig& init, const FocusingProblem& problem, const RmoOptions& options) {
  return rmo_optimize(
      init, [&problem](std::span<const double> phi) { return problem.evaluate(phi); }, options);
}

void write_trace_csv(std::ostream& out, const OptimizerTrace& trace) {
  out << "iteration,objective,gradient_norm\n";
  for (std::size_t i = 0; i < trace.objective.size(); ++i) {
    out << i << ',' << format_double(trace.objective[i]) << ',' << format_double(trace.gradient_norm[i])
        << '\n';
  }
}

}  // namespace nfbeam
