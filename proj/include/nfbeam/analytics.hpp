#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nfbeam/em_core.hpp"
#include "nfbeam/geometry.hpp"
#include "nfbeam/special_functions.hpp"

namespace nfbeam {

/// A non-negative length that may be unbounded.
class Extent {
 public:
  static Extent finite(double value) { return Extent(value, false); }
  static Extent unbounded() { return Extent(0.0, true); }

  bool is_unbounded() const noexcept { return unbounded_; }
  /// Throws std::logic_error when unbounded.
  double value() const;
  /// +infinity when unbounded.
  double as_double() const noexcept;

 private:
  Extent(double v, bool u) : value_(v), unbounded_(u) {}
  double value_;
  bool unbounded_;
};

/// G(R) = 8 eta k^3 nu D^2 / (9 pi^3 C R^2).
double analytic_gain(double distance, double radius, double density, const PhysicalConstants& constants,
                     RadiationDamping damping);

struct FieldScaling {
  double closed_form;  // valid for D << R
  double quadrature;   // disk integral without the D << R step
};

/// On-axis theta-field magnitude under the continuum approximation with unit
/// reference |I| taken from `constants.feed_current`.
FieldScaling field_scaling(double distance, double radius, const PhysicalConstants& constants,
                           RadiationDamping damping, double density);

/// Large-aperture limit of the quadrature branch: prefactor * pi * sqrt(R/2).
double field_saturation(double distance, const PhysicalConstants& constants, RadiationDamping damping,
                        double density);

/// alpha(dR) = D^2 k dR / (2 R (R + dR)). Throws DomainError if R + dR <= 0.
double alpha_of_offset(double offset, double distance, double radius, double wavenumber);

/// Normalized beam-depth gain (9/16) |int_0^1 t^{-1/4} e^{j alpha t} dt|^2.
double beamdepth_gain(double alpha);

/// Smallest positive alpha with beamdepth_gain(alpha) = kappa, kappa in (0, 1].
double alpha_for_level(double kappa);

struct BeamDepthInterval {
  double lower;   // dR^- <= 0
  Extent upper;   // dR^+ >= 0, unbounded once R >= R_lim
};

/// Throws DomainError for kappa outside (0, 1].
BeamDepthInterval beamdepth_limits(double kappa, double distance, double radius, double wavenumber);

/// R_lim = D^2 k / (2 alpha_kappa); unbounded for kappa = 1.
Extent r_limit(double kappa, double radius, double wavenumber);

/// Discrete normalized beam-depth gain evaluated on the actual layout with
/// weights (R / R_n^2) |H1(k rho_n)| |cos psi_n|.
double discrete_beamdepth_gain(const ApertureLayout& layout, double distance, double offset,
                               const PhysicalConstants& constants);

/// Same, for many offsets; weights computed once.
std::vector<double> discrete_beamdepth_curve(const ApertureLayout& layout, double distance,
                                             std::span<const double> offsets,
                                             const PhysicalConstants& constants);

struct BeamDepthProfile {
  double kappa;
  double alpha;
  double lower;
  Extent upper;
  Extent r_limit;
  std::vector<std::pair<double, double>> samples;  // (dR, analytic gain)
};

BeamDepthProfile beamdepth_profile(double kappa, double distance, double radius, double wavenumber,
                                   std::span<const double> offsets);

enum class Normalization { FixedCurrent, PowerNormalized };

struct ScalingReport {
  std::vector<double> radii;
  std::vector<double> element_counts;
  std::vector<double> values;
  double slope;
  Normalization mode;
};

/// Least-squares slope of log(value) against log(N). Needs at least 4 samples.
ScalingReport scaling_report(std::vector<double> radii, std::vector<double> element_counts,
                             std::vector<double> values, Normalization mode);

double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace nfbeam
