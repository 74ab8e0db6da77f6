#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "nfbeam/em_core.hpp"
#include "nfbeam/errors.hpp"
#include "nfbeam/geometry.hpp"
#include "nfbeam/optimizer.hpp"
#include "nfbeam/special_functions.hpp"

using namespace nfbeam;

namespace {

const RadiationDamping& damping() {
  static const RadiationDamping d = radiation_damping(gen::x_band());
  return d;
}

Eigen::MatrixXcd block_diagonal(const PolarizabilitySet& polar) {
  const auto n = static_cast<Eigen::Index>(2 * polar.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < polar.size(); ++i) {
    a.block<2, 2>(static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(2 * i)) = polar.block(i);
  }
  return a;
}

}  // namespace

TEST_CASE("radiation damping constant") {
  const PhysicalConstants& c = gen::x_band();
  const double k = c.wavenumber;
  CHECK(damping().value == doctest::Approx(k * k * k / (3.0 * std::numbers::pi) + k * k / (8.0 * 2e-3)));
  CHECK(damping().value == doctest::Approx(3.722e6).epsilon(1e-3));
}

TEST_CASE("Lorentzian polarizability is passive and lossless") {
  const double cval = damping().value;
  for (int i = 0; i < 64; ++i) {
    const double phi = 2.0 * std::numbers::pi * (i + 0.5) / 64.0;
    const Block2 a = lorentzian_polarizability(phi, damping());
    CHECK(a(0, 1) == Complex(0.0));
    CHECK(a(0, 0) == a(1, 1));
    CHECK(a(0, 0).imag() <= 0.0);
    CHECK((1.0 / a(0, 0)).imag() == doctest::Approx(cval).epsilon(1e-12));
    // Circle of radius 1/(2C) centered at -j/(2C).
    CHECK(std::abs(a(0, 0) + Complex(0.0, 0.5 / cval)) == doctest::Approx(0.5 / cval).epsilon(1e-12));
  }
}

TEST_CASE("radiation-reaction correction") {
  gen::Rng rng(17);
  const double cval = damping().value;
  for (int trial = 0; trial < 200; ++trial) {
    Block2 intrinsic;
    intrinsic << rng.complex_normal(), rng.complex_normal(), rng.complex_normal(), rng.complex_normal();
    intrinsic /= cval;
    const Block2 effective = rr_correct(intrinsic, damping());
    const Block2 expected = intrinsic.inverse() + Complex(0.0, cval) * Block2::Identity();
    CHECK((effective.inverse() - expected).norm() <= 1e-9 * expected.norm());
  }
  // A real static polarizability becomes passive with Im{1/A} = C.
  const Block2 fixed = rr_correct(Block2::Identity() * (-1.0 / cval), damping());
  CHECK((1.0 / fixed(0, 0)).imag() == doctest::Approx(cval));
  CHECK_THROWS_AS(rr_correct(Block2::Identity() * Complex(0.0, 1.0 / cval), damping()), SingularError);
}

TEST_CASE("coupling blocks") {
  const PhysicalConstants& c = gen::x_band();
  gen::Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const double dx = rng.uniform(-0.3, 0.3);
    const double dy = rng.uniform(-0.3, 0.3);
    const Block2 g = coupling_block(dx, dy, c);
    CHECK((g - g.transpose()).norm() <= 1e-14 * g.norm());
    CHECK((g - coupling_block(-dx, -dy, c)).norm() <= 1e-14 * g.norm());
  }
  // Along x the block is diagonal.
  const Block2 gx = coupling_block(0.05, 0.0, c);
  CHECK(std::abs(gx(0, 1)) <= 1e-12 * gx.norm());
  CHECK_THROWS_AS(coupling_block(0.0, 0.0, c), SingularError);

  // Far separation decays.
  const double lam = c.wavelength;
  CHECK(coupling_block(20.0 * lam, 0.0, c).norm() < coupling_block(2.0 * lam, 0.0, c).norm());
}

TEST_CASE("coupling matrix structure") {
  const PhysicalConstants& c = gen::x_band();
  const ApertureLayout l = build_layout(0.05, c);
  const Eigen::MatrixXcd g = coupling_matrix(l, c);
  REQUIRE(g.rows() == 76);
  for (Eigen::Index n = 0; n < 38; ++n) CHECK(g.block<2, 2>(2 * n, 2 * n).norm() == 0.0);
  CHECK((g - g.transpose()).norm() <= 1e-14 * g.norm());
}

TEST_CASE("excitation field follows the feed Hankel wave") {
  const PhysicalConstants& c = gen::x_band();
  const ApertureLayout l = build_layout(0.1, c);
  const Eigen::VectorXcd h = excitation_field(l, c);
  const double k = c.wavenumber;
  for (std::size_t n = 0; n < l.size(); ++n) {
    const Complex h1 = special::hankel2(1, k * l.rho()[n]);
    const Complex x = Complex(0.0, k / 4.0) * h1 * std::sin(l.psi()[n]);
    const Complex y = Complex(0.0, -k / 4.0) * h1 * std::cos(l.psi()[n]);
    CHECK(std::abs(h[2 * n] - x) <= 1e-13 * std::abs(h1) * k);
    CHECK(std::abs(h[2 * n + 1] - y) <= 1e-13 * std::abs(h1) * k);
  }
}

TEST_CASE("coupled solve: equivalent forms and fixed point") {
  const PhysicalConstants& c = gen::x_band();
  gen::Rng rng(31);
  const ApertureLayout l = build_layout(0.05, c);
  const PolarizabilitySet polar = PolarizabilitySet::from_phases(rng.phases(l.size()), damping());
  const Coupling coupling = Coupling::from_layout(l, c);
  const Eigen::VectorXcd hf = excitation_field(l, c);
  const Complex current(0.7, -0.2);
  const DipoleSolution sol = solve_dipoles(polar, coupling, hf, current);

  const Eigen::MatrixXcd a = block_diagonal(polar);
  const Eigen::VectorXcd other = (a.inverse() - coupling.matrix()).partialPivLu().solve(hf * current);
  CHECK((sol.moments - other).norm() <= 1e-10 * sol.moments.norm());

  CHECK((sol.local_field - (hf * current + coupling.matrix() * sol.moments)).norm() <=
        1e-12 * sol.local_field.norm());
  CHECK((sol.moments - a * sol.local_field).norm() <= 1e-10 * sol.moments.norm());
  CHECK(sol.rcond > kMinReciprocalCondition);

  const DipoleSystem system(polar, coupling);
  const Eigen::VectorXcd b = rng.moments(l.size());
  const Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(a.rows(), a.cols()) - a * coupling.matrix();
  CHECK((k.transpose() * system.solve_transposed(b) - b).norm() <= 1e-10 * b.norm());
  CHECK((k * system.solve(b) - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("coupled solve matches a Jacobi fixed-point iteration") {
  const PhysicalConstants& c = gen::x_band();
  gen::Rng rng(41);
  // Widely spaced elements keep the iteration contractive.
  const auto pts = rng.scattered_points(5, 0.05, 0.4, 4.0 * c.wavelength);
  const ApertureLayout l = ApertureLayout::from_positions(pts, 0.4);
  const PolarizabilitySet polar = PolarizabilitySet::from_phases(rng.phases(5), damping());
  const Coupling coupling = Coupling::from_layout(l, c);
  const Eigen::VectorXcd hf = excitation_field(l, c);
  const Eigen::MatrixXcd a = block_diagonal(polar);

  Eigen::VectorXcd m = a * hf;
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::VectorXcd next = a * (hf + coupling.matrix() * m);
    const double change = (next - m).norm();
    m = next;
    if (change <= 1e-15 * m.norm()) break;
  }
  const DipoleSolution sol = solve_dipoles(polar, coupling, hf, 1.0);
  CHECK((sol.moments - m).norm() <= 1e-10 * m.norm());
}

TEST_CASE("uncoupled solve is elementwise") {
  const PhysicalConstants& c = gen::x_band();
  gen::Rng rng(43);
  const ApertureLayout l = build_layout(0.05, c);
  const PolarizabilitySet polar = PolarizabilitySet::from_phases(rng.phases(l.size()), damping());
  const Eigen::VectorXcd hf = excitation_field(l, c);
  const DipoleSolution sol = solve_dipoles(polar, Coupling::none(), hf, 2.0);
  CHECK((sol.moments - block_diagonal(polar) * hf * 2.0).norm() <= 1e-14 * sol.moments.norm());
  CHECK(sol.rcond == 1.0);
}

TEST_CASE("supplied power is non-negative") {
  const PhysicalConstants& c = gen::x_band();
  gen::Rng rng(47);
  const ApertureLayout l = build_layout(0.05, c);
  const Coupling coupling = Coupling::from_layout(l, c);
  const Eigen::VectorXcd hf = excitation_field(l, c);
  for (int trial = 0; trial < 1000; ++trial) {
    const PolarizabilitySet polar = PolarizabilitySet::from_phases(rng.phases(l.size()), damping());
    const bool coupled = trial % 10 == 0;
    const DipoleSolution sol = solve_dipoles(polar, coupled ? coupling : Coupling::none(), hf, 1.0);
    const double p = supplied_power(sol.moments, sol.local_field, c);
    CHECK(p >= 0.0);
  }
}

TEST_CASE("solver errors") {
  const PhysicalConstants& c = gen::x_band();
  const ApertureLayout l = build_layout(0.05, c);
  const Eigen::VectorXcd hf = excitation_field(l, c);
  // G = A^{-1} makes I - A G vanish.
  const Complex a0(-1e-7, -1e-7);
  const PolarizabilitySet polar =
      PolarizabilitySet::from_blocks(std::vector<Block2>(l.size(), Block2::Identity() * a0));
  const auto n = static_cast<Eigen::Index>(2 * l.size());
  const Coupling singular = Coupling::dense(Eigen::MatrixXcd::Identity(n, n) / a0);
  CHECK_THROWS_AS(solve_dipoles(polar, singular, hf, 1.0), SolverError);

  const PolarizabilitySet small =
      PolarizabilitySet::from_blocks(std::vector<Block2>(3, Block2::Identity() * a0));
  CHECK_THROWS_AS(solve_dipoles(small, Coupling::none(), hf, 1.0), DomainError);
  CHECK_THROWS_AS(solve_dipoles(small, Coupling::from_layout(l, c), hf, 1.0), DomainError);
  CHECK_THROWS_AS(supplied_power(hf, hf.head(4), c), DomainError);
}

TEST_CASE("damping and polarizability reference values") {
  const double k = gen::x_band().wavenumber;
  const PhysicalConstants tall = PhysicalConstants::make(10e9, 1e6);
  CHECK(radiation_damping(tall).value == doctest::Approx(k * k * k / (3.0 * std::numbers::pi)).epsilon(1e-6));
  CHECK(radiation_damping(PhysicalConstants::make(10e9, 1e-3)).value > damping().value);

  const double cval = damping().value;
  const Block2 quarter = lorentzian_polarizability(std::numbers::pi / 2.0, damping());
  CHECK((quarter - Block2::Identity() * Complex(0.0, -1.0 / cval)).norm() <= 1e-15 / cval);
  CHECK(lorentzian_polarizability(3.0 * std::numbers::pi / 2.0, damping()).norm() <= 1e-15 / cval);
  const Block2 zero = lorentzian_polarizability(0.0, damping());
  CHECK((zero - Block2::Identity() * Complex(-0.5 / cval, -0.5 / cval)).norm() <= 1e-15 / cval);

  CHECK(rr_correct(Block2::Zero(), damping()).norm() == 0.0);
  // Very strong intrinsic response saturates at -j/C.
  const Block2 big = rr_correct(Block2::Identity() * 1e12, damping());
  CHECK((big - Block2::Identity() * Complex(0.0, -1.0 / cval)).norm() <= 1e-9 / cval);
}

TEST_CASE("excitation symmetries") {
  const PhysicalConstants& c = gen::x_band();
  const double k = c.wavenumber;
  const ApertureLayout axis = ApertureLayout::from_positions({{0.07, 0.0}}, 0.1);
  const Eigen::VectorXcd ha = excitation_field(axis, c);
  CHECK(std::abs(ha[0]) <= 1e-15 * std::abs(ha[1]));
  CHECK(std::abs(ha[1] - Complex(0.0, k / 4.0) * special::hankel2(1, k * 0.07)) <= 1e-13 * std::abs(ha[1]));

  gen::Rng rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const Point2 p = rng.point_in_annulus(0.01, 0.3);
    const ApertureLayout pair = ApertureLayout::from_positions({p, {-p.y, p.x}}, 0.3);
    const Eigen::VectorXcd h = excitation_field(pair, c);
    const double rho = std::hypot(p.x, p.y);
    const double expected = k * k / 16.0 * std::norm(special::hankel2(1, k * rho));
    CHECK(std::norm(h[0]) + std::norm(h[1]) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(h[2] + h[1]) <= 1e-12 * std::sqrt(expected));
    CHECK(std::abs(h[3] - h[0]) <= 1e-12 * std::sqrt(expected));
  }
}

TEST_CASE("coupling decays like a cylindrical wave") {
  const PhysicalConstants& c = gen::x_band();
  const double lam = c.wavelength;
  CHECK(coupling_block(10.0 * lam, 0.0, c).norm() * 4.0 <= coupling_block(lam / 2.0, 0.0, c).norm());
  // Broadside the guided term dominates and falls off as d^{-1/2}.
  const double ratio = coupling_block(0.0, 10.0 * lam, c).norm() / coupling_block(0.0, 40.0 * lam, c).norm();
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("switched-off element carries no moment") {
  const PhysicalConstants& c = gen::x_band();
  gen::Rng rng(59);
  const ApertureLayout l = build_layout(0.05, c);
  std::vector<double> phases = rng.phases(l.size());
  phases[7] = 3.0 * std::numbers::pi / 2.0;
  const DipoleSolution sol = solve_dipoles(PolarizabilitySet::from_phases(phases, damping()),
                                           Coupling::from_layout(l, c), excitation_field(l, c), 1.0);
  CHECK(std::abs(sol.moments[14]) <= 1e-16 * sol.moments.norm());
  CHECK(std::abs(sol.moments[15]) <= 1e-16 * sol.moments.norm());
}

TEST_CASE("supplied power reference forms") {
  const PhysicalConstants& c = gen::x_band();
  const double cval = damping().value;
  const double k = c.wavenumber;
  const ApertureLayout l = build_layout(0.1, c);
  const Eigen::VectorXcd hf = excitation_field(l, c);
  const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(hf.size());
  CHECK(supplied_power(zero, hf, c) == 0.0);

  const std::vector<double> quarter(l.size(), std::numbers::pi / 2.0);
  const DipoleSolution sol = solve_dipoles(PolarizabilitySet::from_phases(quarter, damping()), Coupling::none(), hf, 1.0);
  double sum = 0.0;
  for (std::size_t n = 0; n < l.size(); ++n) sum += k * k / 16.0 * std::norm(special::hankel2(1, k * l.rho()[n]));
  const double oracle = c.angular_frequency * c.permeability / (2.0 * cval) * sum;
  CHECK(oracle > 0.0);
  CHECK(supplied_power(sol.moments, sol.local_field, c) == doctest::Approx(oracle).epsilon(1e-12));

  // Focusing phases: the dominant-term closed form.
  const ApertureLayout big = build_layout(0.2, c);
  const PhaseConfig phases = analytic_phase(big, 1.0, c);
  const Eigen::VectorXcd hb = excitation_field(big, c);
  const DipoleSolution focused =
      solve_dipoles(PolarizabilitySet::from_phases(phases.phases, damping()), Coupling::none(), hb, 1.0);
  const double p = supplied_power(focused.moments, focused.local_field, c);
  const double closed = c.angular_frequency * c.permeability * k * surface_density(big) * 0.2 / (16.0 * cval);
  CHECK(std::abs(p - closed) / p <= 0.1);
}
