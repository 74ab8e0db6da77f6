#include "nfbeam/analytics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nfbeam/errors.hpp"
#include "nfbeam/kernels.hpp"
#include "nfbeam/quadrature.hpp"

namespace nfbeam {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

void require_level(double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw DomainError("gain level kappa must lie in (0, 1]");
  }
}

// eta k^3 |I| nu / (4 pi C) * sqrt(2 / (pi k)), the factor in front of the radial integral.
double radial_prefactor(const PhysicalConstants& c, RadiationDamping damping, double density) {
  const double k = c.wavenumber;
  return c.impedance * k * k * k * std::abs(c.feed_current) * density /
         (4.0 * std::numbers::pi * damping.value) * std::sqrt(2.0 / (std::numbers::pi * k));
}

std::vector<double> beamdepth_weights(const ApertureLayout& layout, double distance,
                                      const PhysicalConstants& constants) {
  const auto rho = layout.rho();
  const auto psi = layout.psi();
  std::vector<double> w(layout.size());
  for (std::size_t n = 0; n < layout.size(); ++n) {
    const double rn2 = distance * distance + rho[n] * rho[n];
    w[n] = distance / rn2 * std::abs(special::hankel2(1, constants.wavenumber * rho[n])) *
           std::abs(std::cos(psi[n]));
  }
  return w;
}

}  // namespace

double Extent::value() const {
  if (unbounded_) throw std::logic_error("value() of an unbounded extent");
  return value_;
}

double Extent::as_double() const noexcept {
  return unbounded_ ? std::numeric_limits<double>::infinity() : value_;
}

double analytic_gain(double distance, double radius, double density, const PhysicalConstants& constants,
                     RadiationDamping damping) {
  require_positive(distance, "observation distance");
  require_positive(radius, "aperture radius");
  require_positive(density, "surface density");
  const double k = constants.wavenumber;
  const double pi3 = std::numbers::pi * std::numbers::pi * std::numbers::pi;
  return 8.0 * constants.impedance * k * k * k * density * radius * radius /
         (9.0 * pi3 * damping.value * distance * distance);
}

FieldScaling field_scaling(double distance, double radius, const PhysicalConstants& constants,
                           RadiationDamping damping, double density) {
  require_positive(distance, "observation distance");
  require_positive(radius, "aperture radius");
  const double prefactor = radial_prefactor(constants, damping, density);

  FieldScaling out{};
  out.closed_form = prefactor * (2.0 / 3.0) * std::pow(radius, 1.5) / distance;

  // rho = D u^2 makes the rho^{1/2} endpoint smooth.
  const double d32 = std::pow(radius, 1.5);
  auto integrand = [&](double u) {
    const double u2 = u * u;
    return 2.0 * d32 * u2 * distance / (distance * distance + radius * radius * u2 * u2);
  };
  const double integral =
      quad::integrate_doubling(integrand, 0.0, 1.0, 1e-13 * std::sqrt(distance), std::size_t{1} << 22);
  out.quadrature = prefactor * integral;
  return out;
}

double field_saturation(double distance, const PhysicalConstants& constants, RadiationDamping damping,
                        double density) {
  require_positive(distance, "observation distance");
  return radial_prefactor(constants, damping, density) * std::numbers::pi * std::sqrt(0.5 * distance);
}

double alpha_of_offset(double offset, double distance, double radius, double wavenumber) {
  require_positive(distance, "observation distance");
  if (!(distance + offset > 0.0)) {
    throw DomainError("focus point lies behind the aperture (R + dR <= 0)");
  }
  return radius * radius * wavenumber * offset / (2.0 * distance * (distance + offset));
}

double beamdepth_gain(double alpha) {
  return (9.0 / 16.0) * std::norm(special::beamdepth_integral(alpha));
}

double alpha_for_level(double kappa) {
  require_level(kappa);
  return special::smallest_positive_root(beamdepth_gain, kappa);
}

BeamDepthInterval beamdepth_limits(double kappa, double distance, double radius, double wavenumber) {
  require_level(kappa);
  require_positive(distance, "observation distance");
  require_positive(radius, "aperture radius");
  const double alpha = alpha_for_level(kappa);
  const double d2k = radius * radius * wavenumber;
  const double r2 = distance * distance;

  BeamDepthInterval out{-2.0 * r2 * alpha / (d2k + 2.0 * distance * alpha), Extent::finite(0.0)};
  const double denominator = d2k - 2.0 * distance * alpha;
  if (denominator <= 1e-12 * d2k) {
    out.upper = Extent::unbounded();
  } else {
    out.upper = Extent::finite(2.0 * r2 * alpha / denominator);
  }
  return out;
}

Extent r_limit(double kappa, double radius, double wavenumber) {
  require_level(kappa);
  require_positive(radius, "aperture radius");
  const double alpha = alpha_for_level(kappa);
  if (alpha <= 0.0) return Extent::unbounded();
  return Extent::finite(radius * radius * wavenumber / (2.0 * alpha));
}

std::vector<double> discrete_beamdepth_curve(const ApertureLayout& layout, double distance,
                                             std::span<const double> offsets,
                                             const PhysicalConstants& constants) {
  require_positive(distance, "observation distance");
  if (layout.empty()) {
    throw EmptyLayoutError("beam-depth gain of an empty layout");
  }
  const std::vector<double> w = beamdepth_weights(layout, distance, constants);
  double matched = 0.0;
  for (double v : w) matched += v;
  if (!(matched > 0.0)) {
    throw DomainError("degenerate layout: all beam-depth weights vanish");
  }
  std::vector<double> out;
  out.reserve(offsets.size());
  for (double offset : offsets) {
    if (!(distance + offset > 0.0)) {
      throw DomainError("focus point lies behind the aperture (R + dR <= 0)");
    }
    const Complex s = kernels::omp::detuned_sum(w, layout.rho(), distance, offset, constants.wavenumber);
    out.push_back(std::norm(s) / (matched * matched));
  }
  return out;
}

double discrete_beamdepth_gain(const ApertureLayout& layout, double distance, double offset,
                               const PhysicalConstants& constants) {
  const double offsets[] = {offset};
  return discrete_beamdepth_curve(layout, distance, offsets, constants).front();
}

BeamDepthProfile beamdepth_profile(double kappa, double distance, double radius, double wavenumber,
                                   std::span<const double> offsets) {
  const BeamDepthInterval limits = beamdepth_limits(kappa, distance, radius, wavenumber);
  BeamDepthProfile p{kappa, alpha_for_level(kappa), limits.lower, limits.upper,
                     r_limit(kappa, radius, wavenumber), {}};
  p.samples.reserve(offsets.size());
  for (double offset : offsets) {
    p.samples.emplace_back(offset, beamdepth_gain(alpha_of_offset(offset, distance, radius, wavenumber)));
  }
  return p;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("log-log fit needs matching samples, at least two");
  }
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw DomainError("log-log fit needs positive samples");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw DomainError("log-log fit is degenerate (all x equal)");
  }
  return sxy / sxx;
}

ScalingReport scaling_report(std::vector<double> radii, std::vector<double> element_counts,
                             std::vector<double> values, Normalization mode) {
  if (element_counts.size() < 4 || element_counts.size() != values.size() ||
      radii.size() != values.size()) {
    throw DomainError("scaling report needs at least 4 matching samples");
  }
  ScalingReport r{std::move(radii), std::move(element_counts), std::move(values), 0.0, mode};
  r.slope = loglog_slope(r.element_counts, r.values);
  if (!std::isfinite(r.slope)) {
    throw NumericalError("scaling slope is not finite");
  }
  return r;
}

}  // namespace nfbeam
