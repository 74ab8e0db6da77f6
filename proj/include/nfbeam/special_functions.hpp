#pragma once

#include <complex>
#include <functional>

namespace nfbeam {

using Complex = std::complex<double>;

namespace special {

/// Bessel function of the first kind J_n(x), n in {0, 1, 2}, x > 0.
double bessel_j(int order, double x);

/// Bessel function of the second kind Y_n(x), n in {0, 1, 2}, x > 0.
double bessel_y(int order, double x);

/// Hankel function of the second kind, H_n^(2)(x) = J_n(x) - j Y_n(x).
///
/// Ascending series below `kHankelCrossover`, Hankel large-argument
/// expansion above. Throws DomainError for x <= 0 (or non-finite) and
/// UnsupportedOrderError for n outside {0, 1, 2}.
Complex hankel2(int order, double x);

inline constexpr double kHankelCrossover = 12.0;

// Exposed so the crossover agreement can be tested directly.
Complex hankel2_series(int order, double x);
Complex hankel2_asymptotic(int order, double x);

/// Integral of t^(-1/4) exp(j alpha t) over [0, 1].
///
/// Evaluated as 4 * int_0^1 u^2 exp(j alpha u^4) du (t = u^4), which is
/// smooth, by panel-doubled Gauss-Legendre to an absolute error below 1e-10.
Complex beamdepth_integral(double alpha);

struct RootScanOptions {
  double scan_step = 0.05;
  double scan_max = 200.0;
  double tolerance = 1e-9;  // absolute, on the returned abscissa
};

/// Smallest x >= 0 with f(x) = target for f decreasing from f(0) > target.
///
/// Scans forward in steps of `scan_step` until f - target changes sign, then
/// bisects. Returns 0 when f(0) already equals target within tolerance.
/// Throws DomainError if f(0) < target or the step is not positive, and
/// NoRootError when no crossing occurs before `scan_max`.
double smallest_positive_root(const std::function<double(double)>& f,
                              double target, const RootScanOptions& options = {});

}  // namespace special
}  // namespace nfbeam
