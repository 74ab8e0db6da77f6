#include "nfbeam/channel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "nfbeam/errors.hpp"
#include "nfbeam/format.hpp"
#include "nfbeam/kernels.hpp"

namespace nfbeam {

namespace {

struct SphericalBasis {
  Eigen::Vector3d theta_hat;
  Eigen::Vector3d phi_hat;
  double cos_theta;
  double cos_phi;
  double sin_phi;
  double distance;
};

SphericalBasis spherical_basis(double vx, double vy, double vz) {
  const double r = std::sqrt(vx * vx + vy * vy + vz * vz);
  const double rho = std::hypot(vx, vy);
  SphericalBasis b{};
  b.distance = r;
  b.cos_theta = vz / r;
  const double sin_theta = rho / r;
  // On the z axis the azimuth is pinned to 0.
  b.cos_phi = rho > 0.0 ? vx / rho : 1.0;
  b.sin_phi = rho > 0.0 ? vy / rho : 0.0;
  b.theta_hat = {b.cos_theta * b.cos_phi, b.cos_theta * b.sin_phi, -sin_theta};
  b.phi_hat = {-b.sin_phi, b.cos_phi, 0.0};
  return b;
}

}  // namespace

Eigen::Matrix2d projection_matrix(const Point3& element, const Point3& s) {
  const double vx = s.x - element.x;
  const double vy = s.y - element.y;
  const double vz = s.z - element.z;
  if (vx == 0.0 && vy == 0.0 && vz == 0.0) {
    throw DomainError("observation point coincides with the element");
  }
  if (s.x == 0.0 && s.y == 0.0 && s.z == 0.0) {
    throw DomainError("observation point at the aperture center has no spherical basis");
  }
  const SphericalBasis common = spherical_basis(s.x, s.y, s.z);
  const SphericalBasis local = spherical_basis(vx, vy, vz);
  Eigen::Matrix2d t;
  t << common.theta_hat.dot(local.theta_hat), common.theta_hat.dot(local.phi_hat),
      common.phi_hat.dot(local.theta_hat), common.phi_hat.dot(local.phi_hat);
  return t;
}

Eigen::Matrix2cd element_focusing(const Point2& element, const Point3& s, double wavenumber) {
  const double vx = s.x - element.x;
  const double vy = s.y - element.y;
  const double vz = s.z;
  const SphericalBasis local = spherical_basis(vx, vy, vz);
  if (!(local.distance > 0.0)) {
    throw DomainError("observation point coincides with an element");
  }
  const Complex spread = std::polar(1.0 / local.distance, -wavenumber * local.distance);
  // Local focusing entries for (m_x, m_y).
  const Complex a_theta_x = spread * local.sin_phi;
  const Complex a_theta_y = -spread * local.cos_phi;
  const Complex a_phi_x = spread * local.cos_theta * local.cos_phi;
  const Complex a_phi_y = spread * local.cos_theta * local.sin_phi;

  const Eigen::Matrix2d t = projection_matrix({element.x, element.y, 0.0}, s);
  Eigen::Matrix2cd f;
  f(0, 0) = t(0, 0) * a_theta_x + t(0, 1) * a_phi_x;
  f(1, 0) = t(1, 0) * a_theta_x + t(1, 1) * a_phi_x;
  f(0, 1) = t(0, 0) * a_theta_y + t(0, 1) * a_phi_y;
  f(1, 1) = t(1, 0) * a_theta_y + t(1, 1) * a_phi_y;
  return f;
}

Eigen::Matrix<Complex, 2, Eigen::Dynamic> channel_matrix(const ApertureLayout& layout,
                                                         const Point3& s,
                                                         const PhysicalConstants& constants) {
  const double k = constants.wavenumber;
  const double prefactor = constants.impedance * k * k / (2.0 * std::numbers::pi);
  return prefactor * kernels::omp::focusing_rows(layout.positions(), s, k);
}

FieldSample scattered_field(const ApertureLayout& layout, const Eigen::VectorXcd& moments,
                            const Point3& s, const PhysicalConstants& constants) {
  if (moments.size() != static_cast<Eigen::Index>(2 * layout.size())) {
    throw DomainError("moment vector length does not match the layout");
  }
  const Eigen::Vector2cd e = channel_matrix(layout, s, constants) * moments;
  return {e(0), e(1)};
}

FieldSample onaxis_fields(const ApertureLayout& layout, const Eigen::VectorXcd& moments, double distance,
                          const PhysicalConstants& constants) {
  if (!(distance > 0.0)) {
    throw DomainError("on-axis distance must be positive");
  }
  if (moments.size() != static_cast<Eigen::Index>(2 * layout.size())) {
    throw DomainError("moment vector length does not match the layout");
  }
  const double k = constants.wavenumber;
  const auto rho = layout.rho();
  Complex sum_x = 0.0;
  Complex sum_y = 0.0;
  for (std::size_t n = 0; n < layout.size(); ++n) {
    const double rn2 = distance * distance + rho[n] * rho[n];
    const double rn = std::sqrt(rn2);
    const Complex w = std::polar(distance / rn2, -k * rn);
    sum_x += w * moments(2 * n);
    sum_y += w * moments(2 * n + 1);
  }
  const double prefactor = constants.impedance * k * k / (2.0 * std::numbers::pi);
  return {-prefactor * sum_y, prefactor * sum_x};
}

Eigen::Vector2cd channel_and_signal(const ApertureLayout& layout, const Point3& s,
                                    const PolarizabilitySet& polar, const Coupling& coupling,
                                    const Eigen::VectorXcd& excitation,
                                    const PhysicalConstants& constants) {
  const DipoleSolution solution = solve_dipoles(polar, coupling, excitation, constants.feed_current);
  return channel_matrix(layout, s, constants) * solution.moments;
}

double realized_gain(const FieldSample& field, double supplied_power) {
  if (!(supplied_power > 0.0)) {
    throw DomainError("realized gain requires positive supplied power");
  }
  return (std::norm(field.theta) + std::norm(field.phi)) / supplied_power;
}

std::vector<FieldSample> field_grid(const ApertureLayout& layout, const Eigen::VectorXcd& moments,
                                    std::span<const Point3> points, const PhysicalConstants& constants) {
  if (moments.size() != static_cast<Eigen::Index>(2 * layout.size())) {
    throw DomainError("moment vector length does not match the layout");
  }
  return kernels::omp::field_grid(layout.positions(), moments, points, constants);
}

void write_field_grid_csv(std::ostream& out, std::span<const Point3> points,
                          std::span<const FieldSample> fields) {
  out << "s_x,s_y,s_z,re_e_theta,im_e_theta,re_e_phi,im_e_phi\n";
  for (std::size_t i = 0; i < points.size() && i < fields.size(); ++i) {
    out << format_double(points[i].x) << ',' << format_double(points[i].y) << ','
        << format_double(points[i].z) << ',' << format_double(fields[i].theta.real()) << ','
        << format_double(fields[i].theta.imag()) << ',' << format_double(fields[i].phi.real()) << ','
        << format_double(fields[i].phi.imag()) << '\n';
  }
}

}  // namespace nfbeam
