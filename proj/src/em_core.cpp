#include "nfbeam/em_core.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "nfbeam/errors.hpp"
#include "nfbeam/format.hpp"
#include "nfbeam/kernels.hpp"
#include "nfbeam/special_functions.hpp"

namespace nfbeam {

namespace {
constexpr Complex kJ{0.0, 1.0};
}

RadiationDamping radiation_damping(const PhysicalConstants& constants) {
  const double k = constants.wavenumber;
  const double h = constants.waveguide_height;
  if (!(k > 0.0) || !(h > 0.0)) {
    throw DomainError("radiation damping needs positive wavenumber and height");
  }
  return {k * k * k / (3.0 * std::numbers::pi) + k * k / (8.0 * h)};
}

Block2 lorentzian_polarizability(double phase, RadiationDamping damping) {
  if (!(damping.value > 0.0)) {
    throw DomainError("radiation damping must be positive");
  }
  const Complex a = -(kJ + std::polar(1.0, phase)) / (2.0 * damping.value);
  return a * Block2::Identity();
}

Block2 rr_correct(const Block2& intrinsic, RadiationDamping damping) {
  const Block2 factor = Block2::Identity() + kJ * damping.value * intrinsic;
  const Complex det = factor.determinant();
  const double scale = std::max(1.0, factor.cwiseAbs().maxCoeff());
  if (std::abs(det) <= 1e-14 * scale * scale) {
    throw SingularError("radiation-reaction correction is singular (I + jC A~ not invertible)");
  }
  return intrinsic * factor.inverse();
}

PolarizabilitySet PolarizabilitySet::from_phases(std::span<const double> phases,
                                                 RadiationDamping damping) {
  PolarizabilitySet set;
  set.phases_.assign(phases.begin(), phases.end());
  set.blocks_.reserve(phases.size());
  for (double phi : phases) {
    set.blocks_.push_back(lorentzian_polarizability(phi, damping));
  }
  return set;
}

PolarizabilitySet PolarizabilitySet::from_blocks(std::vector<Block2> blocks) {
  PolarizabilitySet set;
  set.blocks_ = std::move(blocks);
  return set;
}

Eigen::VectorXcd excitation_field(const ApertureLayout& layout, const PhysicalConstants& constants) {
  const double k = constants.wavenumber;
  const auto rho = layout.rho();
  const auto psi = layout.psi();
  Eigen::VectorXcd hf(2 * layout.size());
  for (std::size_t n = 0; n < layout.size(); ++n) {
    if (!(rho[n] > 0.0)) {
      throw SingularError("element " + std::to_string(n) + " sits on the feed");
    }
    const Complex h1 = special::hankel2(1, k * rho[n]);
    hf(2 * n) = (kJ * k / 4.0) * h1 * std::sin(psi[n]);
    hf(2 * n + 1) = (-kJ * k / 4.0) * h1 * std::cos(psi[n]);
  }
  return hf;
}

Block2 coupling_block(double dx, double dy, const PhysicalConstants& constants) {
  const double d = std::hypot(dx, dy);
  if (!(d > 0.0)) {
    throw SingularError("coupling between coincident elements is undefined");
  }
  const double k = constants.wavenumber;
  const double kd = k * d;
  const double ux = dx / d;
  const double uy = dy / d;

  // Waveguide: g = (-j/4) H0(kd), g' = (jk/4) H1(kd), g'' = (jk^2/4)(H0 - H1/(kd)).
  const Complex h0 = special::hankel2(0, kd);
  const Complex h1 = special::hankel2(1, kd);
  const Complex wg_g = -kJ / 4.0 * h0;
  const Complex wg_d1 = kJ * k / 4.0 * h1;
  const Complex wg_d2 = kJ * k * k / 4.0 * (h0 - h1 / kd);

  // Free space: g = e^{-jkd}/(4 pi d).
  const Complex fs_g = std::polar(1.0, -kd) / (4.0 * std::numbers::pi * d);
  const Complex s = -kJ * k - 1.0 / d;
  const Complex fs_d1 = fs_g * s;
  const Complex fs_d2 = fs_g * (s * s + 1.0 / (d * d));

  auto dyadic = [&](Complex g, Complex d1, Complex d2) {
    Block2 b;
    const Complex radial = d2;
    const Complex transverse = d1 / d;
    b(0, 0) = k * k * g + radial * ux * ux + transverse * (1.0 - ux * ux);
    b(1, 1) = k * k * g + radial * uy * uy + transverse * (1.0 - uy * uy);
    b(0, 1) = (radial - transverse) * ux * uy;
    b(1, 0) = b(0, 1);
    return b;
  };

  return dyadic(wg_g, wg_d1, wg_d2) / constants.waveguide_height +
         2.0 * dyadic(fs_g, fs_d1, fs_d2);
}

Eigen::MatrixXcd coupling_matrix(const ApertureLayout& layout, const PhysicalConstants& constants) {
  return kernels::omp::assemble_coupling(layout.positions(), constants);
}

DipoleSystem::DipoleSystem(const PolarizabilitySet& polar, const Coupling& coupling)
    : blocks_(polar.blocks()), coupled_(coupling.enabled()) {
  if (!coupled_) return;
  const Eigen::MatrixXcd& g = coupling.matrix();
  const Eigen::Index n2 = static_cast<Eigen::Index>(2 * blocks_.size());
  if (g.rows() != n2 || g.cols() != n2) {
    throw DomainError("coupling matrix size does not match the polarizability set");
  }
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(n2, n2);
  for (std::size_t n = 0; n < blocks_.size(); ++n) {
    const auto row = static_cast<Eigen::Index>(2 * n);
    k.middleRows(row, 2).noalias() -= blocks_[n] * g.middleRows(row, 2);
  }
  lu_.compute(k);
  rcond_ = lu_.rcond();
}

Eigen::VectorXcd DipoleSystem::apply_polarizability(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out(v.size());
  for (std::size_t n = 0; n < blocks_.size(); ++n) {
    out.segment<2>(2 * n) = blocks_[n] * v.segment<2>(2 * n);
  }
  return out;
}

Eigen::VectorXcd DipoleSystem::solve(const Eigen::VectorXcd& rhs) const {
  if (!coupled_) return rhs;
  return lu_.solve(rhs);
}

Eigen::VectorXcd DipoleSystem::solve_transposed(const Eigen::VectorXcd& rhs) const {
  if (!coupled_) return rhs;
  return lu_.transpose().solve(rhs);
}

DipoleSolution solve_dipoles(const PolarizabilitySet& polar, const Coupling& coupling,
                             const Eigen::VectorXcd& excitation, Complex current) {
  if (excitation.size() != static_cast<Eigen::Index>(2 * polar.size())) {
    throw DomainError("excitation length does not match the polarizability set");
  }
  DipoleSystem system(polar, coupling);
  if (!(system.rcond() >= kMinReciprocalCondition)) {
    throw SolverError("coupled dipole system is ill-conditioned (rcond estimate " +
                          std::to_string(system.rcond()) + ")",
                      system.rcond());
  }
  const Eigen::VectorXcd h0 = excitation * current;
  DipoleSolution out;
  out.moments = system.solve(system.apply_polarizability(h0));
  out.local_field = h0;
  if (coupling.enabled()) {
    out.local_field.noalias() += coupling.matrix() * out.moments;
  }
  out.rcond = system.rcond();
  return out;
}

double supplied_power(const Eigen::VectorXcd& moments, const Eigen::VectorXcd& local_field,
                      const PhysicalConstants& constants) {
  if (moments.size() != local_field.size()) {
    throw DomainError("moment and local-field vectors differ in length");
  }
  // Plain transpose on m, conjugate on h_loc.
  const Complex sum = (moments.array() * local_field.array().conjugate()).sum();
  return 0.5 * (kJ * constants.angular_frequency * constants.permeability * sum).real();
}

void write_dipoles_csv(std::ostream& out, const DipoleSolution& solution) {
  out << "index,re_m,im_m,re_h_loc,im_h_loc\n";
  for (Eigen::Index i = 0; i < solution.moments.size(); ++i) {
    out << i << ',' << format_double(solution.moments(i).real()) << ','
        << format_double(solution.moments(i).imag()) << ','
        << format_double(solution.local_field(i).real()) << ','
        << format_double(solution.local_field(i).imag()) << '\n';
  }
}

}  // namespace nfbeam
