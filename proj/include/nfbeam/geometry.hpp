#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace nfbeam {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kVacuumPermeability = 4.0e-7 * 3.14159265358979323846;

/// Operating point of the waveguide-fed aperture, SI units throughout.
struct PhysicalConstants {
  double frequency;          // Hz
  double light_speed;        // m/s
  double wavelength;         // m
  double wavenumber;         // rad/m
  double angular_frequency;  // rad/s
  double waveguide_height;   // m
  double permeability;       // H/m
  double impedance;          // Ohm, mu0 * c
  Complex feed_current;      // A

  /// Throws DomainError unless frequency, height and light speed are
  /// positive and the feed current is nonzero.
  static PhysicalConstants make(double frequency_hz, double waveguide_height_m,
                                double light_speed = kSpeedOfLight,
                                Complex feed_current = 1.0);
};

struct Point2 {
  double x;
  double y;
};

struct Point3 {
  double x;
  double y;
  double z;
};

/// Element positions on the z = 0 plane around a feed at the origin.
class ApertureLayout {
 public:
  /// Arbitrary placements, e.g. for randomized tests. Every position must lie
  /// in (0, radius] from the origin. ring_index is 0 for all elements.
  static ApertureLayout from_positions(std::vector<Point2> positions, double radius);

  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  double radius() const noexcept { return radius_; }

  std::span<const Point2> positions() const noexcept { return positions_; }
  std::span<const int> ring_index() const noexcept { return ring_index_; }
  std::span<const double> ring_angle() const noexcept { return ring_angle_; }
  /// Distance from the feed.
  std::span<const double> rho() const noexcept { return rho_; }
  /// Feed-to-element angle atan2(p_y - y_n, p_x - x_n) with the feed p at the origin.
  std::span<const double> psi() const noexcept { return psi_; }

 private:
  friend ApertureLayout build_layout(double radius, const PhysicalConstants& constants);
  ApertureLayout() = default;
  void cache_polar();

  double radius_ = 0.0;
  std::vector<Point2> positions_;
  std::vector<int> ring_index_;
  std::vector<double> ring_angle_;
  std::vector<double> rho_;
  std::vector<double> psi_;
};

/// Concentric rings at radii m * lambda/2, m = 1..floor(D / (lambda/2)),
/// ring m holding round(2 pi m) elements starting at angle 0. Ring-major,
/// angle ascending. Throws EmptyLayoutError when D < lambda/2.
ApertureLayout build_layout(double radius, const PhysicalConstants& constants);

/// N / (pi D^2). Throws EmptyLayoutError for an empty layout.
double surface_density(const ApertureLayout& layout);

/// CSV with columns x_m, y_m, ring_index, angle_rad.
void write_layout_csv(std::ostream& out, const ApertureLayout& layout);

}  // namespace nfbeam
