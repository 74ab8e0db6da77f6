#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nfbeam/geometry.hpp"

namespace nfbeam {

using Block2 = Eigen::Matrix2cd;

/// Radiation damping C = k^3/(3 pi) + k^2/(8 h), units m^-3.
struct RadiationDamping {
  double value;
};

RadiationDamping radiation_damping(const PhysicalConstants& constants);

/// Lorentzian-constrained effective polarizability -(1/2C)(j + e^{j phi}) I_2.
/// phi = 3 pi / 2 gives the zero block (element switched off).
Block2 lorentzian_polarizability(double phase, RadiationDamping damping);

/// Radiation-reaction corrected polarizability A = Ã (I_2 + j C Ã)^{-1}.
/// Throws SingularError when I_2 + j C Ã is singular.
Block2 rr_correct(const Block2& intrinsic, RadiationDamping damping);

/// Per-element effective polarizability blocks, optionally tagged with the
/// tunable phases they were generated from.
class PolarizabilitySet {
 public:
  static PolarizabilitySet from_phases(std::span<const double> phases, RadiationDamping damping);
  static PolarizabilitySet from_blocks(std::vector<Block2> blocks);

  std::size_t size() const noexcept { return blocks_.size(); }
  const std::vector<Block2>& blocks() const noexcept { return blocks_; }
  const Block2& block(std::size_t n) const { return blocks_[n]; }
  /// Empty when constructed from explicit blocks.
  const std::vector<double>& phases() const noexcept { return phases_; }

 private:
  std::vector<Block2> blocks_;
  std::vector<double> phases_;
};

/// Feed excitation shape h_f (current factored out), stacked [x_1, y_1, x_2, ...]:
///   x: (j k / 4) H1(k rho) sin(psi),  y: (-j k / 4) H1(k rho) cos(psi).
Eigen::VectorXcd excitation_field(const ApertureLayout& layout, const PhysicalConstants& constants);

/// Coupling block between two elements separated in-plane by (dx, dy):
/// waveguide term (1/h)(k^2 I + grad grad)(-j/4) H0(k d) plus the image-doubled
/// free-space term 2 (k^2 I + grad grad) e^{-jkd}/(4 pi d), transverse part.
/// Throws SingularError for coincident positions.
Block2 coupling_block(double dx, double dy, const PhysicalConstants& constants);

/// Dense 2N x 2N mutual-coupling matrix with zero diagonal blocks.
Eigen::MatrixXcd coupling_matrix(const ApertureLayout& layout, const PhysicalConstants& constants);

/// Either no mutual coupling or a dense coupling matrix.
class Coupling {
 public:
  static Coupling none() { return Coupling{}; }
  static Coupling dense(Eigen::MatrixXcd matrix) {
    Coupling c;
    c.matrix_ = std::move(matrix);
    return c;
  }
  static Coupling from_layout(const ApertureLayout& layout, const PhysicalConstants& constants) {
    return dense(coupling_matrix(layout, constants));
  }

  bool enabled() const noexcept { return matrix_.has_value(); }
  const Eigen::MatrixXcd& matrix() const { return *matrix_; }

 private:
  std::optional<Eigen::MatrixXcd> matrix_;
};

/// Factorization of K = I - A G, reused for forward and adjoint solves.
class DipoleSystem {
 public:
  DipoleSystem(const PolarizabilitySet& polar, const Coupling& coupling);

  /// A applied blockwise.
  Eigen::VectorXcd apply_polarizability(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;
  Eigen::VectorXcd solve_transposed(const Eigen::VectorXcd& rhs) const;
  double rcond() const noexcept { return rcond_; }

 private:
  std::vector<Block2> blocks_;
  bool coupled_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double rcond_ = 1.0;
};

inline constexpr double kMinReciprocalCondition = 1e-12;

struct DipoleSolution {
  Eigen::VectorXcd moments;      // m, A m^2
  Eigen::VectorXcd local_field;  // h_loc = h_0 + G m, A/m
  double rcond = 1.0;
};

/// m = (I - A G)^{-1} A h_f I. Throws SolverError when the reciprocal
/// condition estimate falls below kMinReciprocalCondition.
DipoleSolution solve_dipoles(const PolarizabilitySet& polar, const Coupling& coupling,
                             const Eigen::VectorXcd& excitation, Complex current);

/// 1/2 Re{ j omega mu0 sum_n m_n^T conj(h_loc,n) }, in W.
double supplied_power(const Eigen::VectorXcd& moments, const Eigen::VectorXcd& local_field,
                      const PhysicalConstants& constants);

/// Debug dump: index, re/im of m and h_loc.
void write_dipoles_csv(std::ostream& out, const DipoleSolution& solution);

}  // namespace nfbeam
