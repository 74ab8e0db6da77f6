#include "nfbeam/kernels.hpp"

#include <cmath>
#include <exception>
#include <numbers>

#include "nfbeam/em_core.hpp"
#include "nfbeam/errors.hpp"

namespace nfbeam::kernels {

namespace {

double field_prefactor(const PhysicalConstants& constants) {
  const double k = constants.wavenumber;
  return constants.impedance * k * k / (2.0 * std::numbers::pi);
}

FieldSample field_at(std::span<const Point2> positions, const Eigen::VectorXcd& moments,
                     const Point3& s, double k, double prefactor) {
  Complex theta = 0.0;
  Complex phi = 0.0;
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const Eigen::Matrix2cd f = element_focusing(positions[n], s, k);
    const Eigen::Vector2cd m = moments.segment<2>(2 * n);
    theta += f(0, 0) * m(0) + f(0, 1) * m(1);
    phi += f(1, 0) * m(0) + f(1, 1) * m(1);
  }
  return {prefactor * theta, prefactor * phi};
}

// Exceptions must not escape an OpenMP region; the first one is kept and
// rethrown after the loop.
class ErrorSlot {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(nfbeam_error_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace

namespace serial {

Eigen::MatrixXcd assemble_coupling(std::span<const Point2> positions, const PhysicalConstants& constants) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      g.block<2, 2>(2 * i, 2 * j) = coupling_block(positions[i].x - positions[j].x,
                                                   positions[i].y - positions[j].y, constants);
    }
  }
  return g;
}

Eigen::Matrix<Complex, 2, Eigen::Dynamic> focusing_rows(std::span<const Point2> positions,
                                                        const Point3& s, double wavenumber) {
  Eigen::Matrix<Complex, 2, Eigen::Dynamic> rows(2, 2 * positions.size());
  for (std::size_t n = 0; n < positions.size(); ++n) {
    rows.block<2, 2>(0, 2 * n) = element_focusing(positions[n], s, wavenumber);
  }
  return rows;
}

std::vector<FieldSample> field_grid(std::span<const Point2> positions, const Eigen::VectorXcd& moments,
                                    std::span<const Point3> points, const PhysicalConstants& constants) {
  std::vector<FieldSample> out(points.size());
  const double prefactor = field_prefactor(constants);
  for (std::size_t p = 0; p < points.size(); ++p) {
    out[p] = field_at(positions, moments, points[p], constants.wavenumber, prefactor);
  }
  return out;
}

Complex detuned_sum(std::span<const double> weights, std::span<const double> rho, double distance,
                    double offset, double wavenumber) {
  const double focus = distance + offset;
  Complex sum = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const double r2 = rho[n] * rho[n];
    const double path = std::sqrt(focus * focus + r2) - std::sqrt(distance * distance + r2);
    sum += std::polar(weights[n], -wavenumber * path);
  }
  return sum;
}

}  // namespace serial

namespace omp {

Eigen::MatrixXcd assemble_coupling(std::span<const Point2> positions, const PhysicalConstants& constants) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  // Blocks are symmetric and even in the separation, so G_ji = G_ij.
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    errors.run([&] {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Block2 b = coupling_block(positions[i].x - positions[j].x,
                                        positions[i].y - positions[j].y, constants);
        g.block<2, 2>(2 * i, 2 * j) = b;
        g.block<2, 2>(2 * j, 2 * i) = b.transpose();
      }
    });
  }
  errors.rethrow();
  return g;
}

Eigen::Matrix<Complex, 2, Eigen::Dynamic> focusing_rows(std::span<const Point2> positions,
                                                        const Point3& s, double wavenumber) {
  const auto n = static_cast<std::ptrdiff_t>(positions.size());
  Eigen::Matrix<Complex, 2, Eigen::Dynamic> rows(2, 2 * n);
  ErrorSlot errors;
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    errors.run([&] { rows.block<2, 2>(0, 2 * i) = element_focusing(positions[i], s, wavenumber); });
  }
  errors.rethrow();
  return rows;
}

std::vector<FieldSample> field_grid(std::span<const Point2> positions, const Eigen::VectorXcd& moments,
                                    std::span<const Point3> points, const PhysicalConstants& constants) {
  const auto count = static_cast<std::ptrdiff_t>(points.size());
  std::vector<FieldSample> out(points.size());
  const double prefactor = field_prefactor(constants);
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    errors.run([&] { out[p] = field_at(positions, moments, points[p], constants.wavenumber, prefactor); });
  }
  errors.rethrow();
  return out;
}

Complex detuned_sum(std::span<const double> weights, std::span<const double> rho, double distance,
                    double offset, double wavenumber) {
  const double focus = distance + offset;
  const auto count = static_cast<std::ptrdiff_t>(weights.size());
  double re = 0.0;
  double im = 0.0;
#pragma omp parallel for reduction(+ : re, im) schedule(static) if (count > 1024)
  for (std::ptrdiff_t n = 0; n < count; ++n) {
    const double r2 = rho[n] * rho[n];
    const double path = std::sqrt(focus * focus + r2) - std::sqrt(distance * distance + r2);
    re += weights[n] * std::cos(wavenumber * path);
    im -= weights[n] * std::sin(wavenumber * path);
  }
  return {re, im};
}

}  // namespace omp

}  // namespace nfbeam::kernels
