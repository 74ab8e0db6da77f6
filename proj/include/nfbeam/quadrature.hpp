#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

#include "nfbeam/errors.hpp"

namespace nfbeam::quad {

inline constexpr std::size_t kGaussOrder = 20;

struct GaussRule {
  std::array<double, kGaussOrder> nodes;    // on [-1, 1]
  std::array<double, kGaussOrder> weights;
};

// 20-point Gauss-Legendre rule, nodes from Newton iteration on P_20.
const GaussRule& gauss_legendre_20();

// Composite Gauss-Legendre over `panels` equal panels of [a, b].
template <class F>
auto integrate_panels(F&& f, double a, double b, std::size_t panels) {
  using Value = std::decay_t<std::invoke_result_t<F&, double>>;
  const GaussRule& rule = gauss_legendre_20();
  const double width = (b - a) / static_cast<double>(panels);
  Value total{};
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    Value panel{};
    for (std::size_t i = 0; i < kGaussOrder; ++i) {
      panel += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
    }
    total += panel * (0.5 * width);
  }
  return total;
}

// Doubles the panel count until two successive estimates differ by less
// than `abs_tol`. Throws NumericalError past `max_panels`.
template <class F>
auto integrate_doubling(F&& f, double a, double b, double abs_tol,
                        std::size_t max_panels = std::size_t{1} << 18) {
  std::size_t panels = 1;
  auto previous = integrate_panels(f, a, b, panels);
  while (panels < max_panels) {
    panels *= 2;
    auto current = integrate_panels(f, a, b, panels);
    if (std::abs(current - previous) < abs_tol) {
      return current;
    }
    previous = current;
  }
  throw NumericalError("quadrature did not converge within panel limit");
}

}  // namespace nfbeam::quad
