#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "generators.hpp"
#include "nfbeam/analytics.hpp"
#include "nfbeam/errors.hpp"

using namespace nfbeam;

namespace {

const RadiationDamping& damping() {
  static const RadiationDamping d = radiation_damping(gen::x_band());
  return d;
}

// int_0^D sqrt(rho) R / (R^2 + rho^2) d rho, by series in D/R (D < R) or in
// R/D (D > R, subtracting the tail from the full integral pi sqrt(R/2)).
double radial_integral_series(double radius, double distance) {
  double sum = 0.0;
  if (radius < distance) {
    for (int n = 0; n < 400; ++n) {
      const double e = 4.0 * n + 3.0;
      sum += (n % 2 ? -1.0 : 1.0) * 2.0 / e * std::pow(radius, e / 2.0) / std::pow(distance, 2.0 * n + 1.0);
    }
    return sum;
  }
  for (int n = 0; n < 400; ++n) {
    const double e = 4.0 * n + 1.0;
    sum += (n % 2 ? -1.0 : 1.0) * 2.0 / e * std::pow(distance, 2.0 * n + 1.0) / std::pow(radius, e / 2.0);
  }
  return std::numbers::pi * std::sqrt(distance / 2.0) - sum;
}

}  // namespace

TEST_CASE("analytic gain") {
  const PhysicalConstants& c = gen::x_band();
  const double nu = 572.0 / (std::numbers::pi * 0.04);
  // Independent evaluation (CODATA mu0, hence the loose tolerance).
  CHECK(analytic_gain(1.0, 0.2, nu, c, damping()) == doctest::Approx(4863.596712420877).epsilon(1e-8));
  gen::Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const double r = rng.uniform(0.5, 10.0);
    const double d = rng.uniform(0.05, 0.4);
    const double g = analytic_gain(r, d, nu, c, damping());
    CHECK(analytic_gain(2.0 * r, d, nu, c, damping()) == doctest::Approx(g / 4.0).epsilon(1e-14));
    CHECK(analytic_gain(r, 2.0 * d, nu, c, damping()) == doctest::Approx(4.0 * g).epsilon(1e-14));
  }
  CHECK_THROWS_AS(analytic_gain(0.0, 0.2, nu, c, damping()), DomainError);
  CHECK_THROWS_AS(analytic_gain(1.0, -0.2, nu, c, damping()), DomainError);
  CHECK_THROWS_AS(analytic_gain(1.0, 0.2, 0.0, c, damping()), DomainError);
}

TEST_CASE("field scaling quadrature and its limits") {
  const PhysicalConstants& c = gen::x_band();
  const double nu = 4500.0;
  const double r = 1.0;
  const double unit = field_scaling(r, 0.01, c, damping(), nu).closed_form / ((2.0 / 3.0) * std::pow(0.01, 1.5));

  for (double ratio : {1e-3, 0.1, 0.5, 2.0, 10.0, 1e3, 1e4}) {
    const FieldScaling f = field_scaling(r, ratio * r, c, damping(), nu);
    CAPTURE(ratio);
    CHECK(f.quadrature == doctest::Approx(unit * radial_integral_series(ratio * r, r)).epsilon(1e-10));
  }
  // D << R: the branches differ by the relative correction (3/7)(D/R)^2.
  const FieldScaling small = field_scaling(10.0, 0.02, c, damping(), nu);
  CHECK(1.0 - small.quadrature / small.closed_form == doctest::Approx(3.0 / 7.0 * 4e-6).epsilon(1e-3));
  CHECK(field_scaling(5.0, 0.08, c, damping(), nu).closed_form /
            field_scaling(5.0, 0.02, c, damping(), nu).closed_form ==
        doctest::Approx(8.0));

  // Saturation: the gap to pi sqrt(R/2) closes like (2 sqrt 2 / pi) sqrt(R/D).
  const double limit = field_saturation(r, c, damping(), nu);
  CHECK(limit == doctest::Approx(unit * std::numbers::pi * std::sqrt(0.5)));
  for (double ratio : {1e2, 1e3, 1e4, 1e5}) {
    const double gap = 1.0 - field_scaling(r, ratio * r, c, damping(), nu).quadrature / limit;
    const double tail = 2.0 * std::numbers::sqrt2 / std::numbers::pi / std::sqrt(ratio);
    CAPTURE(ratio);
    CHECK(gap == doctest::Approx(tail).epsilon(1e-3));
  }
  CHECK(1.0 - field_scaling(r, 1e4 * r, c, damping(), nu).quadrature / limit <= 0.02);
  CHECK_THROWS_AS(field_scaling(0.0, 0.1, c, damping(), nu), DomainError);
}

TEST_CASE("normalized beam-depth gain") {
  CHECK(std::abs(beamdepth_gain(0.0) - 1.0) <= 1e-12);
  CHECK(beamdepth_gain(4.19) == doctest::Approx(0.1500196480060471).epsilon(1e-9));
  gen::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = rng.uniform(0.0, 100.0);
    const double g = beamdepth_gain(a);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0 + 1e-12);
    CHECK(beamdepth_gain(-a) == doctest::Approx(g).epsilon(1e-12));
  }
}

TEST_CASE("gain levels and far-field transition") {
  const double k = gen::x_band().wavenumber;
  const double a15 = alpha_for_level(0.15);
  CHECK(std::abs(a15 - 4.190116586193343) <= 2e-9);
  CHECK(beamdepth_gain(a15) == doctest::Approx(0.15).epsilon(1e-8));
  CHECK(alpha_for_level(1.0) == 0.0);

  const Extent rlim = r_limit(0.15, 0.2, k);
  REQUIRE_FALSE(rlim.is_unbounded());
  CHECK(rlim.value() == doctest::Approx(1.0003755164510706).epsilon(1e-8));
  CHECK(std::abs(rlim.value() - 1.0) <= 0.02);
  CHECK(r_limit(1.0, 0.2, k).is_unbounded());
  CHECK(r_limit(1.0, 0.2, k).as_double() == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS((void)r_limit(1.0, 0.2, k).value(), std::logic_error);

  for (double bad : {0.0, -0.1, 1.2, std::nan("")}) {
    CHECK_THROWS_AS(alpha_for_level(bad), DomainError);
    CHECK_THROWS_AS(beamdepth_limits(bad, 1.0, 0.2, k), DomainError);
  }
}

TEST_CASE("beam-depth limits satisfy the Fresnel identity") {
  const double k = gen::x_band().wavenumber;
  gen::Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const double kappa = rng.uniform(0.05, 0.99);
    const double d = rng.uniform(0.05, 0.4);
    const double ak = alpha_for_level(kappa);
    const double rlim = r_limit(kappa, d, k).value();
    const double r = rng.uniform(0.05, 0.95) * rlim;
    const BeamDepthInterval lim = beamdepth_limits(kappa, r, d, k);
    CHECK(lim.lower <= 0.0);
    REQUIRE_FALSE(lim.upper.is_unbounded());
    CHECK(lim.upper.value() >= 0.0);
    CHECK(std::abs(alpha_of_offset(lim.lower, r, d, k) + ak) <= 1e-12 * std::max(1.0, ak));
    CHECK(std::abs(alpha_of_offset(lim.upper.value(), r, d, k) - ak) <= 1e-12 * std::max(1.0, ak));
    // Beyond R_lim no positive offset drops below kappa.
    CHECK(beamdepth_limits(kappa, rlim * rng.uniform(1.01, 3.0), d, k).upper.is_unbounded());
  }
  CHECK(alpha_of_offset(0.0, 1.0, 0.2, k) == 0.0);
  CHECK(alpha_of_offset(1e12, 1.0, 0.2, k) == doctest::Approx(0.04 * k / 2.0));
  CHECK_THROWS_AS(alpha_of_offset(-2.0, 1.0, 0.2, k), DomainError);
  CHECK_THROWS_AS(alpha_of_offset(-1.0, 1.0, 0.2, k), DomainError);
}

TEST_CASE("discrete beam depth on the ring layout") {
  const PhysicalConstants& c = gen::x_band();
  const ApertureLayout l = build_layout(0.2, c);
  CHECK(discrete_beamdepth_gain(l, 1.0, 0.0, c) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(discrete_beamdepth_gain(l, 1.0, 1e3, c) == doctest::Approx(0.14517366896319106).epsilon(1e-9));

  std::vector<double> offsets;
  for (int i = 0; i < 200; ++i) offsets.push_back(10.0 * i / 199.0);
  const std::vector<double> curve = discrete_beamdepth_curve(l, 1.0, offsets, c);
  double worst = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    CHECK(curve[i] == doctest::Approx(discrete_beamdepth_gain(l, 1.0, offsets[i], c)).epsilon(1e-13));
    CHECK(curve[i] <= 1.0 + 1e-12);
    worst = std::max(worst, std::abs(curve[i] - beamdepth_gain(alpha_of_offset(offsets[i], 1.0, 0.2, c.wavenumber))));
  }
  CHECK(worst == doctest::Approx(0.0049184199868135825).epsilon(1e-6));
  CHECK(worst <= 0.03);
  CHECK_THROWS_AS(discrete_beamdepth_gain(l, 1.0, -1.5, c), DomainError);
}

TEST_CASE("beam-depth profile") {
  const double k = gen::x_band().wavenumber;
  const double offsets[] = {0.0, 0.5, 2.0};
  const BeamDepthProfile p = beamdepth_profile(0.5, 1.0, 0.2, k, offsets);
  CHECK(p.alpha == alpha_for_level(0.5));
  CHECK(p.samples.size() == 3);
  CHECK(p.samples[0].second == doctest::Approx(1.0));
  CHECK(p.r_limit.value() == doctest::Approx(r_limit(0.5, 0.2, k).value()));
}

TEST_CASE("log-log slopes") {
  const std::vector<double> x = {6, 19, 63, 94};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(1.5).epsilon(1e-13));
  const ScalingReport r = scaling_report({0.02, 0.04, 0.06, 0.08}, x, y, Normalization::FixedCurrent);
  CHECK(r.slope == doctest::Approx(1.5));
  CHECK_THROWS_AS(scaling_report({0.02, 0.04}, {6, 19}, {1, 2}, Normalization::PowerNormalized), DomainError);
  const std::vector<double> flat = {2, 2, 2};
  const std::vector<double> any = {1, 2, 3};
  CHECK_THROWS_AS(loglog_slope(flat, any), DomainError);
  const std::vector<double> neg = {1, -2, 3};
  CHECK_THROWS_AS(loglog_slope(any, neg), DomainError);
}

TEST_CASE("beam-depth interval edge cases") {
  const double k = gen::x_band().wavenumber;
  const BeamDepthInterval flat = beamdepth_limits(1.0, 1.0, 0.2, k);
  CHECK(flat.lower == 0.0);
  CHECK(flat.upper.value() == 0.0);

  const double rlim = r_limit(0.15, 0.2, k).value();
  CHECK(beamdepth_limits(0.15, rlim, 0.2, k).upper.is_unbounded());
  CHECK(r_limit(0.15, 0.4, k).value() == doctest::Approx(4.0 * rlim).epsilon(1e-14));
  // A higher level is reached at a smaller alpha, hence further out.
  CHECK(alpha_for_level(0.5) < alpha_for_level(0.15));
  CHECK(r_limit(0.5, 0.2, k).value() > rlim);

  // R_lim sits within 0.04% of 1 m, so the upper limit at exactly 1 m hinges
  // on the speed of light: finite (kilometres) for the exact value, unbounded
  // for the rounded one.
  const BeamDepthInterval exact = beamdepth_limits(0.15, 1.0, 0.2, k);
  CHECK(exact.upper.value() > 1e3);
  const double k_rounded = PhysicalConstants::make(10e9, 2e-3, 3e8).wavenumber;
  CHECK(beamdepth_limits(0.15, 1.0, 0.2, k_rounded).upper.is_unbounded());

  CHECK(alpha_of_offset(1e6, 1.0, 0.2, k) == doctest::Approx(0.04 * k / 2.0).epsilon(1e-5));
}

TEST_CASE("discrete beam depth at a closer focus") {
  const PhysicalConstants& c = gen::x_band();
  const ApertureLayout l = build_layout(0.2, c);
  REQUIRE(l.size() == 572);
  const BeamDepthInterval lim = beamdepth_limits(0.15, 0.5, 0.2, c.wavenumber);
  REQUIRE_FALSE(lim.upper.is_unbounded());
  CHECK(lim.upper.value() == doctest::Approx(0.4996247653625271).epsilon(1e-8));
  // At D/R = 0.4 the paraxial phase misses the quartic term (about 0.3 rad at
  // the rim), so the exact-distance sum sits above kappa. Independent values.
  CHECK(discrete_beamdepth_gain(l, 0.5, lim.upper.value(), c) == doctest::Approx(0.187544346074329).epsilon(1e-7));
  CHECK(discrete_beamdepth_gain(l, 0.5, lim.lower, c) == doctest::Approx(0.26350650596397446).epsilon(1e-7));
  CHECK(std::abs(discrete_beamdepth_gain(l, 0.5, lim.upper.value(), c) - 0.15) <= 0.05);
}

TEST_CASE("small aperture field law") {
  const PhysicalConstants& c = gen::x_band();
  const FieldScaling f = field_scaling(5.0, 0.02, c, damping(), 4500.0);
  CHECK(std::abs(f.quadrature / f.closed_form - 1.0) <= 1e-3);
  CHECK(field_scaling(5.0, 0.04, c, damping(), 4500.0).closed_form / f.closed_form ==
        doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
}
