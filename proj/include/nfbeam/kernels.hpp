#pragma once

// Data-parallel inner loops. Each kernel has a plain serial version kept as
// the reference and an OpenMP version used by the library; tests assert the
// two agree and bench/ compares their speed.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "nfbeam/channel.hpp"
#include "nfbeam/geometry.hpp"

namespace nfbeam::kernels {

namespace serial {

Eigen::MatrixXcd assemble_coupling(std::span<const Point2> positions, const PhysicalConstants& constants);

/// 2 x 2N projected focusing rows (no prefactor).
Eigen::Matrix<Complex, 2, Eigen::Dynamic> focusing_rows(std::span<const Point2> positions,
                                                        const Point3& s, double wavenumber);

std::vector<FieldSample> field_grid(std::span<const Point2> positions, const Eigen::VectorXcd& moments,
                                    std::span<const Point3> points, const PhysicalConstants& constants);

/// sum_n w_n exp(-jk (sqrt((R+dR)^2 + rho_n^2) - sqrt(R^2 + rho_n^2))).
Complex detuned_sum(std::span<const double> weights, std::span<const double> rho, double distance,
                    double offset, double wavenumber);

}  // namespace serial

namespace omp {

Eigen::MatrixXcd assemble_coupling(std::span<const Point2> positions, const PhysicalConstants& constants);

Eigen::Matrix<Complex, 2, Eigen::Dynamic> focusing_rows(std::span<const Point2> positions,
                                                        const Point3& s, double wavenumber);

std::vector<FieldSample> field_grid(std::span<const Point2> positions, const Eigen::VectorXcd& moments,
                                    std::span<const Point3> points, const PhysicalConstants& constants);

Complex detuned_sum(std::span<const double> weights, std::span<const double> rho, double distance,
                    double offset, double wavenumber);

}  // namespace omp

}  // namespace nfbeam::kernels
