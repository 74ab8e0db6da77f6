#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "nfbeam/channel.hpp"
#include "nfbeam/em_core.hpp"
#include "nfbeam/geometry.hpp"

namespace nfbeam {

/// Tunable element phases, kept wrapped to [0, 2 pi).
struct PhaseConfig {
  std::vector<double> phases;

  static PhaseConfig wrapped(std::vector<double> raw);
};

double wrap_phase(double phase);

/// Focusing phase phi_n = k R_n(R) - arg(h0y_n): aligns the coherent part of
/// m_n^y with the propagation phase towards s = (0, 0, R).
PhaseConfig analytic_phase(const ApertureLayout& layout, double distance, const PhysicalConstants& constants);

struct ObjectiveValue {
  double value;                  // (V/m)^2
  std::vector<double> gradient;  // d value / d phi_n
};

using PhaseObjective = std::function<ObjectiveValue(std::span<const double>)>;

/// |e_theta(s)|^2 as a function of the Lorentzian phases under the full
/// coupled (or uncoupled) model. The gradient uses one adjoint solve with the
/// transposed system.
class FocusingProblem {
 public:
  FocusingProblem(const ApertureLayout& layout, const PhysicalConstants& constants, Coupling coupling,
                  const Point3& observation);

  ObjectiveValue evaluate(std::span<const double> phases) const;
  double value(std::span<const double> phases) const;

  std::size_t size() const noexcept { return static_cast<std::size_t>(excitation_.size() / 2); }
  const Eigen::VectorXcd& excitation() const noexcept { return excitation_; }
  const Coupling& coupling() const noexcept { return coupling_; }
  RadiationDamping damping() const noexcept { return damping_; }
  const PhysicalConstants& constants() const noexcept { return constants_; }
  /// eta k^2 / (2 pi) times the projected theta focusing row.
  const Eigen::VectorXcd& theta_row() const noexcept { return theta_row_; }

 private:
  PhysicalConstants constants_;
  RadiationDamping damping_;
  Coupling coupling_;
  Eigen::VectorXcd excitation_;
  Eigen::VectorXcd theta_row_;
};

ObjectiveValue objective_and_gradient(const PhaseConfig& config, const FocusingProblem& problem);

/// Stagnation: several accepted steps in a row changed the objective by no
/// more than rounding.
enum class Termination { GradientTolerance, MaxIterations, LineSearchFailure, Stagnation };

std::string_view to_string(Termination reason);

struct OptimizerTrace {
  int iterations = 0;
  std::vector<double> objective;      // entry 0 is the initial point
  std::vector<double> gradient_norm;
  Termination reason = Termination::MaxIterations;
  /// Largest | |u_n| - 1 | seen after any retraction.
  double max_modulus_deviation = 0.0;
};

struct RmoOptions {
  int max_iters = 500;
  /// Stop once the phase-gradient norm drops below grad_tol times the
  /// current objective value.
  double grad_tol = 1e-8;
  int max_backtracks = 50;
  double armijo = 1e-4;
};

struct RmoResult {
  PhaseConfig phases;
  OptimizerTrace trace;
};

/// Riemannian conjugate gradient (Polak-Ribiere+, restart on non-ascent) on
/// the product of unit circles u_n = e^{j phi_n}, maximizing the objective.
/// Retraction is normalization; backtracking keeps the objective monotone.
RmoResult rmo_optimize(const PhaseConfig& init, const PhaseObjective& objective,
                       const RmoOptions& options = {});

RmoResult rmo_optimize(const PhaseConfig& init, const FocusingProblem& problem,
                       const RmoOptions& options = {});

/// CSV: iteration, objective, gradient_norm.
void write_trace_csv(std::ostream& out, const OptimizerTrace& trace);

}  // namespace nfbeam
