#include "pinchloc/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pinchloc {

ChannelParams ChannelParams::at_carrier(double carrier_hz, double alpha, double tx_power, double noise_power,
                                        double effective_index) {
  if (!(carrier_hz > 0.0) || !(effective_index > 0.0)) {
    throw std::invalid_argument("ChannelParams::at_carrier: carrier and effective index must be positive");
  }
  ChannelParams p;
  p.carrier_hz = carrier_hz;
  p.wavelength = kSpeedOfLight / carrier_hz;
  p.guide_wavelength = p.wavelength / effective_index;
  p.alpha = alpha;
  p.tx_power = tx_power;
  p.noise_power = noise_power;
  p.eta = kSpeedOfLight * kSpeedOfLight / (16.0 * std::numbers::pi * std::numbers::pi * carrier_hz * carrier_hz);
  p.validate();
  return p;
}

void ChannelParams::validate() const {
  std::ostringstream bad;
  if (!(carrier_hz > 0.0)) bad << " carrier_hz";
  if (!(wavelength > 0.0)) bad << " wavelength";
  if (!(guide_wavelength > 0.0)) bad << " guide_wavelength";
  if (!(alpha >= 2.0) || !std::isfinite(alpha)) bad << " alpha";
  if (!(tx_power > 0.0)) bad << " tx_power";
  if (!(noise_power >= 0.0)) bad << " noise_power";
  if (carrier_hz > 0.0) {
    const double expected =
        kSpeedOfLight * kSpeedOfLight / (16.0 * std::numbers::pi * std::numbers::pi * carrier_hz * carrier_hz);
    if (!(std::abs(eta - expected) <= 1e-9 * expected)) bad << " eta";
  }
  if (const auto fields = bad.str(); !fields.empty()) {
    throw std::invalid_argument("invalid ChannelParams fields:" + fields);
  }
}

std::complex<double> channel_gain(Point2 target, Point2 pa, Point2 feed, const ChannelParams& params) {
  const double d = distance(target, pa);
  if (!(d > 0.0)) throw std::domain_error("channel_gain: target coincides with the PA");
  const double in_guide = distance(feed, pa);
  const double cycles = d / params.wavelength + in_guide / params.guide_wavelength;
  const double phase = -2.0 * std::numbers::pi * std::fmod(cycles, 1.0);
  return std::polar(std::sqrt(params.eta) / std::pow(d, params.alpha / 2.0), phase);
}

double sinr_from_distances(std::span<const double> distances, std::size_t k, double alpha, double normalized_noise) {
  if (k >= distances.size()) throw std::domain_error("sinr: waveguide index out of range");
  double interference = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (i != k) interference += std::pow(distances[i], -alpha);
  }
  return std::pow(distances[k], -alpha) / (interference + normalized_noise);
}

double sinr(const Deployment& deployment, std::size_t k, const ChannelParams& params) {
  if (k >= deployment.size()) throw std::domain_error("sinr: waveguide index out of range");
  std::vector<double> d(deployment.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = deployment.activated_distance(i);
  return sinr_from_distances(d, k, params.alpha, params.normalized_noise());
}

RssSample rss_sample(double d, double alpha, double sigma_p, Rng& rng) {
  if (!(d > 0.0)) throw std::domain_error("rss_sample: distance must be positive");
  if (!(sigma_p >= 0.0)) throw std::domain_error("rss_sample: sigma_p must be non-negative");
  double noise = 0.0;
  if (sigma_p > 0.0) noise = std::normal_distribution<double>(0.0, sigma_p)(rng);
  return {0, 0, -alpha * std::log(d) + noise, d};
}

double sigma_p_sq(double alpha, double expected_sinr) {
  if (!(expected_sinr > 0.0)) throw std::domain_error("sigma_p_sq: expected SINR must be positive");
  return std::numbers::ln10 / (10.0 * alpha * expected_sinr);
}

}  // namespace pinchloc
