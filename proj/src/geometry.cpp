#include "nfbeam/geometry.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "nfbeam/errors.hpp"
#include "nfbeam/format.hpp"

namespace nfbeam {

PhysicalConstants PhysicalConstants::make(double frequency_hz, double waveguide_height_m,
                                          double light_speed, Complex feed_current) {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
    throw DomainError("frequency must be positive");
  }
  if (!(waveguide_height_m > 0.0) || !std::isfinite(waveguide_height_m)) {
    throw DomainError("waveguide height must be positive");
  }
  if (!(light_speed > 0.0) || !std::isfinite(light_speed)) {
    throw DomainError("light speed must be positive");
  }
  if (feed_current == Complex{0.0, 0.0}) {
    throw DomainError("feed current must be nonzero");
  }
  PhysicalConstants c{};
  c.frequency = frequency_hz;
  c.light_speed = light_speed;
  c.wavelength = light_speed / frequency_hz;
  c.wavenumber = 2.0 * std::numbers::pi / c.wavelength;
  c.angular_frequency = 2.0 * std::numbers::pi * frequency_hz;
  c.waveguide_height = waveguide_height_m;
  c.permeability = kVacuumPermeability;
  c.impedance = kVacuumPermeability * light_speed;
  c.feed_current = feed_current;
  return c;
}

void ApertureLayout::cache_polar() {
  rho_.resize(positions_.size());
  psi_.resize(positions_.size());
  for (std::size_t n = 0; n < positions_.size(); ++n) {
    const auto [x, y] = positions_[n];
    rho_[n] = std::hypot(x, y);
    psi_[n] = std::atan2(0.0 - y, 0.0 - x);
  }
}

ApertureLayout ApertureLayout::from_positions(std::vector<Point2> positions, double radius) {
  if (positions.empty()) {
    throw EmptyLayoutError("layout has no elements");
  }
  if (!(radius > 0.0)) {
    throw DomainError("aperture radius must be positive");
  }
  ApertureLayout layout;
  layout.radius_ = radius;
  layout.positions_ = std::move(positions);
  layout.ring_index_.assign(layout.positions_.size(), 0);
  layout.ring_angle_.resize(layout.positions_.size());
  for (std::size_t n = 0; n < layout.positions_.size(); ++n) {
    const auto [x, y] = layout.positions_[n];
    layout.ring_angle_[n] = std::atan2(y, x);
  }
  layout.cache_polar();
  for (double r : layout.rho_) {
    if (!(r > 0.0) || r > radius * (1.0 + 1e-12)) {
      throw DomainError("element distance from feed must lie in (0, D]");
    }
  }
  return layout;
}

ApertureLayout build_layout(double radius, const PhysicalConstants& constants) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("aperture radius must be positive");
  }
  const double spacing = 0.5 * constants.wavelength;
  // Slack so an exact multiple of lambda/2 is not lost to rounding.
  const int rings = static_cast<int>(std::floor(radius / spacing + 1e-9));
  if (rings < 1) {
    throw EmptyLayoutError("aperture radius is smaller than lambda/2; no ring fits");
  }

  ApertureLayout layout;
  layout.radius_ = radius;
  for (int m = 1; m <= rings; ++m) {
    const double ring_radius = m * spacing;
    const int count = static_cast<int>(std::lround(2.0 * std::numbers::pi * m));
    for (int q = 0; q < count; ++q) {
      const double angle = 2.0 * std::numbers::pi * q / count;
      layout.positions_.push_back({ring_radius * std::cos(angle), ring_radius * std::sin(angle)});
      layout.ring_index_.push_back(m);
      layout.ring_angle_.push_back(angle);
    }
  }
  layout.cache_polar();
  return layout;
}

double surface_density(const ApertureLayout& layout) {
  if (layout.empty()) {
    throw EmptyLayoutError("surface density of an empty layout");
  }
  const double d = layout.radius();
  return static_cast<double>(layout.size()) / (std::numbers::pi * d * d);
}

void write_layout_csv(std::ostream& out, const ApertureLayout& layout) {
  out << "x_m,y_m,ring_index,angle_rad\n";
  const auto pos = layout.positions();
  for (std::size_t n = 0; n < layout.size(); ++n) {
    out << format_double(pos[n].x) << ',' << format_double(pos[n].y) << ','
        << layout.ring_index()[n] << ',' << format_double(layout.ring_angle()[n]) << '\n';
  }
}

}  // namespace nfbeam
