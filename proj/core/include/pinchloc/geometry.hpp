#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pinchloc/random.hpp"
#include "pinchloc/types.hpp"

namespace pinchloc {

/// Network-level parameters of the waveguide/PA deployment.
struct NetworkConfig {
  double line_density = 0.1 / 3.14159265358979323846;  ///< waveguide line density, 1/m
  double pa_density = 0.1;                             ///< candidate PA positions per metre of waveguide
  double disk_radius = 30.0;                           ///< deployment disk radius, m
  int num_waveguides = 5;                              ///< waveguides used for localization
  int pas_per_waveguide = 1;                           ///< predefined PA positions per waveguide in the multi-PA FIM
  std::uint64_t seed = 1;
  Point2 target{};  ///< origin unless validating off-origin behaviour

  /// Throws std::invalid_argument naming every offending field.
  void validate() const;
};

/// Waveguide { (x, y) : x cos(theta) + y sin(theta) = rho }.
struct Line {
  double rho = 0.0;
  double theta = 0.0;

  Point2 normal() const;
  Point2 direction() const;
  /// Foot of the perpendicular from the origin.
  Point2 foot() const { return rho * normal(); }
  /// Point at signed coordinate `t` along the line, measured from the foot.
  Point2 at(double t) const;
  /// Half-length of the chord inside a disk of radius `radius`; zero if the line misses it.
  double half_chord(double radius) const;
};

struct Deployment {
  std::vector<Line> lines;                       ///< ascending rho
  std::vector<std::vector<Point2>> pa_positions; ///< per line, ascending signed coordinate
  std::vector<std::size_t> activated;            ///< per line, index of the PA nearest the target
  Point2 target{};
  double disk_radius = 0.0;
  /// Chords that came up empty and were redrawn (at-least-one-PA conditioning).
  std::size_t resampled_chords = 0;

  std::size_t size() const { return lines.size(); }
  Point2 activated_pa(std::size_t k) const { return pa_positions.at(k).at(activated.at(k)); }
  double activated_distance(std::size_t k) const { return distance(activated_pa(k), target); }
  /// Waveguide feed point: the chord end at negative signed coordinate.
  Point2 feed_point(std::size_t k) const;
  /// The `count` candidate positions on line `k` nearest the target, nearest first.
  std::vector<Point2> nearest_pas(std::size_t k, std::size_t count) const;
};

/// Poisson line process restricted to lines hitting the disk; sorted by rho.
std::vector<Line> sample_plp(const NetworkConfig& config, Rng& rng);

/// 1-D HPPP of candidate PA positions on the chord of `line` inside the disk.
/// Throws std::domain_error if the line misses the disk.
std::vector<Point2> sample_pa_positions(const Line& line, double pa_density, double disk_radius, Rng& rng);

/// Full realization: lines, PAs (at least one per chord), and the activated PA per line.
Deployment sample_deployment(const NetworkConfig& config, Rng& rng);

// Closed-form distance laws.

/// Density of the distance to the k-th nearest waveguide (k >= 1).
double rho_k_pdf(double x, int k, double line_density);
double rho_k_cdf(double x, int k, double line_density);

/// Density of the nearest-PA distance given the perpendicular distance rho.
double d_cond_pdf(double r, double rho, double pa_density);
double d_cond_cdf(double r, double rho, double pa_density);

}  // namespace pinchloc
