#include "nfbeam/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nfbeam/errors.hpp"
#include "nfbeam/quadrature.hpp"

namespace nfbeam {

namespace quad {

const GaussRule& gauss_legendre_20() {
  static const GaussRule rule = [] {
    GaussRule r{};
    constexpr int n = static_cast<int>(kGaussOrder);
    for (int i = 0; i < n; ++i) {
      // Chebyshev-like starting guess, refined by Newton on P_n.
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = z;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      r.nodes[i] = z;
      r.weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
  }();
  return rule;
}

}  // namespace quad

namespace special {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

void check_order(int order) {
  if (order < 0 || order > 2) {
    throw UnsupportedOrderError("Bessel/Hankel order " + std::to_string(order) +
                                " not supported (expected 0, 1 or 2)");
  }
}

void check_argument(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("Bessel/Hankel argument must be positive and finite");
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Returns (J_n, Y_n) from the ascending series.
std::pair<double, double> bessel_series(int n, double x) {
  const double half = 0.5 * x;
  const double q = -half * half;

  double term = std::pow(half, n) / factorial(n);
  double harmonic_k = 0.0;       // H_k
  double harmonic_nk = 0.0;      // H_{n+k}
  for (int i = 1; i <= n; ++i) harmonic_nk += 1.0 / i;

  double j_sum = 0.0;
  double psi_sum = 0.0;
  for (int k = 0; k < 500; ++k) {
    j_sum += term;
    psi_sum += (harmonic_k + harmonic_nk - 2.0 * kEulerGamma) * term;
    const double next = term * q / ((k + 1.0) * (k + 1.0 + n));
    harmonic_k += 1.0 / (k + 1.0);
    harmonic_nk += 1.0 / (k + 1.0 + n);
    term = next;
    if (k > half && (std::abs(term) < 1e-18 * std::abs(j_sum) || std::abs(term) < 1e-30)) {
      break;
    }
  }

  double finite = 0.0;
  for (int k = 0; k < n; ++k) {
    finite += factorial(n - k - 1) / factorial(k) * std::pow(half, 2 * k - n);
  }

  const double y = (2.0 / std::numbers::pi) * j_sum * std::log(half) -
                   finite / std::numbers::pi - psi_sum / std::numbers::pi;
  return {j_sum, y};
}

}  // namespace

Complex hankel2_series(int order, double x) {
  check_order(order);
  check_argument(x);
  const auto [j, y] = bessel_series(order, x);
  return {j, -y};
}

Complex hankel2_asymptotic(int order, double x) {
  check_order(order);
  check_argument(x);
  const double mu = 4.0 * order * order;
  // sum_k (-j)^k a_k(n) / x^k
  Complex sum = 1.0;
  Complex term = 1.0;
  double previous = 1.0;
  const Complex minus_j{0.0, -1.0};
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= minus_j * ((mu - odd * odd) / (8.0 * k * x));
    const double magnitude = std::abs(term);
    if (magnitude > previous) break;
    sum += term;
    if (magnitude < 1e-17) break;
    previous = magnitude;
  }
  const double phase = x - 0.5 * order * std::numbers::pi - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * std::polar(1.0, -phase) * sum;
}

Complex hankel2(int order, double x) {
  check_order(order);
  check_argument(x);
  return x < kHankelCrossover ? hankel2_series(order, x) : hankel2_asymptotic(order, x);
}

double bessel_j(int order, double x) { return hankel2(order, x).real(); }

double bessel_y(int order, double x) { return -hankel2(order, x).imag(); }

Complex beamdepth_integral(double alpha) {
  if (!std::isfinite(alpha)) {
    throw DomainError("beam-depth integral requires a finite alpha");
  }
  auto integrand = [alpha](double u) {
    const double u2 = u * u;
    return 4.0 * u2 * std::polar(1.0, alpha * u2 * u2);
  };
  return quad::integrate_doubling(integrand, 0.0, 1.0, 1e-11);
}

double smallest_positive_root(const std::function<double(double)>& f, double target,
                              const RootScanOptions& options) {
  if (!(options.scan_step > 0.0)) {
    throw DomainError("root scan step must be positive");
  }
  const double tol = options.tolerance;
  const double f0 = f(0.0) - target;
  if (std::abs(f0) <= tol) return 0.0;
  if (f0 < 0.0) {
    throw DomainError("root scan requires f(0) > target");
  }

  double lo = 0.0;
  double hi = 0.0;
  bool bracketed = false;
  for (long i = 1;; ++i) {
    const double x = options.scan_step * static_cast<double>(i);
    if (x > options.scan_max) break;
    const double fx = f(x) - target;
    if (fx <= 0.0) {
      hi = x;
      bracketed = true;
      break;
    }
    lo = x;
  }
  if (!bracketed) {
    throw NoRootError("no crossing of target " + std::to_string(target) +
                          " in [0, " + std::to_string(options.scan_max) + "]",
                      0.0, options.scan_max);
  }

  while (hi - lo > 2.0 * tol && hi - lo > 4e-16 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid) - target;
    if (fm == 0.0) return mid;
    if (fm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace special
}  // namespace nfbeam
