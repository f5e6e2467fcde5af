#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "pinchloc/geometry.hpp"
#include "pinchloc/random.hpp"
#include "pinchloc/types.hpp"

namespace pinchloc {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Physical-layer parameters. Build through `at_carrier` so eta and the
/// wavelengths stay consistent with the carrier frequency.
struct ChannelParams {
  double carrier_hz = 0.0;
  double wavelength = 0.0;        ///< m
  double guide_wavelength = 0.0;  ///< m
  double alpha = 2.1;             ///< path-loss exponent
  double tx_power = 1.0;          ///< per-PA transmit power, W
  double noise_power = 0.0;       ///< AWGN variance, W
  double eta = 0.0;               ///< c^2 / (16 pi^2 f_c^2), m^2

  static ChannelParams at_carrier(double carrier_hz, double alpha = 2.1, double tx_power = 1.0,
                                  double noise_power = 1e-12, double effective_index = 1.4);

  /// sigma^2 / (P_t eta).
  double normalized_noise() const { return noise_power / (tx_power * eta); }

  void validate() const;
};

struct RssSample {
  std::size_t waveguide_index = 0;
  std::size_t pa_index = 0;
  double value = 0.0;          ///< log-power, ln P_r - ln eta - ln P_t
  double true_distance = 0.0;  ///< m
};

/// Complex LoS gain from the PA at `pa` (fed from `feed`) to `target`.
/// Throws std::domain_error when target and PA coincide.
std::complex<double> channel_gain(Point2 target, Point2 pa, Point2 feed, const ChannelParams& params);

/// SINR of the activated PA on line `k` (0-based), all other lines interfering.
double sinr(const Deployment& deployment, std::size_t k, const ChannelParams& params);

/// Same ratio from precomputed activated-PA distances.
double sinr_from_distances(std::span<const double> distances, std::size_t k, double alpha, double normalized_noise);

/// r = -alpha ln d + n, n ~ N(0, sigma_p^2).
RssSample rss_sample(double d, double alpha, double sigma_p, Rng& rng);

/// RSS noise variance ln(10) / (10 alpha E{SINR}).
double sigma_p_sq(double alpha, double expected_sinr);

}  // namespace pinchloc
