#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "nfbeam/em_core.hpp"
#include "nfbeam/geometry.hpp"

namespace nfbeam {

/// Transverse scattered field in the common spherical basis at s (V/m).
struct FieldSample {
  Complex theta;
  Complex phi;
};

/// T_{n->s}: rows (theta_s, phi_s), columns (theta_{s,n}, phi_{s,n}); entries
/// are unit-vector inner products. An observation point on the z axis uses
/// azimuth 0, i.e. the common basis (x, y). Throws DomainError when s
/// coincides with r_n or with the aperture center.
Eigen::Matrix2d projection_matrix(const Point3& element, const Point3& s);

/// Projected focusing entries of one element for its (m_x, m_y) components:
/// row 0 feeds e_theta, row 1 feeds e_phi. Excludes the eta k^2 / (2 pi) prefactor.
Eigen::Matrix2cd element_focusing(const Point2& element, const Point3& s, double wavenumber);

/// Dual-polarized channel H(s), 2 x 2N, prefactor included.
Eigen::Matrix<Complex, 2, Eigen::Dynamic> channel_matrix(const ApertureLayout& layout,
                                                         const Point3& s,
                                                         const PhysicalConstants& constants);

/// General per-element projection pipeline: e = H(s) m.
FieldSample scattered_field(const ApertureLayout& layout, const Eigen::VectorXcd& moments,
                            const Point3& s, const PhysicalConstants& constants);

/// Closed-form field at s = (0, 0, R):
///   e_theta = -(eta k^2 / 2 pi) sum (R / R_n^2) e^{-jkR_n} m_n^y,
///   e_phi   =  (eta k^2 / 2 pi) sum (R / R_n^2) e^{-jkR_n} m_n^x.
FieldSample onaxis_fields(const ApertureLayout& layout, const Eigen::VectorXcd& moments, double distance,
                          const PhysicalConstants& constants);

/// y = H(s) (I - A G)^{-1} A h_f I as a 2-vector (e_theta, e_phi).
Eigen::Vector2cd channel_and_signal(const ApertureLayout& layout, const Point3& s,
                                    const PolarizabilitySet& polar, const Coupling& coupling,
                                    const Eigen::VectorXcd& excitation,
                                    const PhysicalConstants& constants);

/// (|e_theta|^2 + |e_phi|^2) / P_sup. Throws DomainError for P_sup <= 0.
double realized_gain(const FieldSample& field, double supplied_power);

/// Scattered field at many observation points, parallel over points.
std::vector<FieldSample> field_grid(const ApertureLayout& layout, const Eigen::VectorXcd& moments,
                                    std::span<const Point3> points, const PhysicalConstants& constants);

/// CSV: s_x, s_y, s_z, re/im of e_theta and e_phi.
void write_field_grid_csv(std::ostream& out, std::span<const Point3> points,
                          std::span<const FieldSample> fields);

}  // namespace nfbeam
