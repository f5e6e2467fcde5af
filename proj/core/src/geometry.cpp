#include "pinchloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace pinchloc {

namespace {

constexpr std::size_t kMaxChordRedraws = 1'000'000;

}  // namespace

void NetworkConfig::validate() const {
  std::ostringstream bad;
  if (!(line_density > 0.0) || !std::isfinite(line_density)) bad << " line_density";
  if (!(pa_density > 0.0) || !std::isfinite(pa_density)) bad << " pa_density";
  if (!(disk_radius > 0.0) || !std::isfinite(disk_radius)) bad << " disk_radius";
  if (num_waveguides < 1) bad << " num_waveguides";
  if (pas_per_waveguide < 1) bad << " pas_per_waveguide";
  if (!std::isfinite(target.x) || !std::isfinite(target.y) || norm(target) > disk_radius) bad << " target";
  if (const auto fields = bad.str(); !fields.empty()) {
    throw std::invalid_argument("invalid NetworkConfig fields:" + fields);
  }
}

Point2 Line::normal() const { return {std::cos(theta), std::sin(theta)}; }

Point2 Line::direction() const { return {-std::sin(theta), std::cos(theta)}; }

Point2 Line::at(double t) const { return foot() + t * direction(); }

double Line::half_chord(double radius) const {
  if (rho >= radius) return 0.0;
  return std::sqrt((radius - rho) * (radius + rho));
}

Point2 Deployment::feed_point(std::size_t k) const { return lines.at(k).at(-lines.at(k).half_chord(disk_radius)); }

std::vector<Point2> Deployment::nearest_pas(std::size_t k, std::size_t count) const {
  std::vector<Point2> pas = pa_positions.at(k);
  std::stable_sort(pas.begin(), pas.end(),
                   [&](Point2 a, Point2 b) { return distance(a, target) < distance(b, target); });
  if (pas.size() > count) pas.resize(count);
  return pas;
}

std::vector<Line> sample_plp(const NetworkConfig& config, Rng& rng) {
  const double mean = 2.0 * std::numbers::pi * config.line_density * config.disk_radius;
  const auto count = std::poisson_distribution<long long>(mean)(rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Line> lines;
  lines.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    const double rho = config.disk_radius * unit(rng);
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    lines.push_back({rho, theta});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.rho < b.rho; });
  return lines;
}

std::vector<Point2> sample_pa_positions(const Line& line, double pa_density, double disk_radius, Rng& rng) {
  if (line.rho > disk_radius) {
    throw std::domain_error("sample_pa_positions: line does not intersect the disk");
  }
  const double half = line.half_chord(disk_radius);
  if (half <= 0.0) return {};

  const auto count = std::poisson_distribution<long long>(pa_density * 2.0 * half)(rng);
  std::uniform_real_distribution<double> along(-half, half);
  std::vector<double> coords(static_cast<std::size_t>(count));
  for (auto& t : coords) t = along(rng);
  std::sort(coords.begin(), coords.end());

  std::vector<Point2> points;
  points.reserve(coords.size());
  for (double t : coords) points.push_back(line.at(t));
  return points;
}

Deployment sample_deployment(const NetworkConfig& config, Rng& rng) {
  Deployment dep;
  dep.target = config.target;
  dep.disk_radius = config.disk_radius;
  dep.lines = sample_plp(config, rng);
  dep.pa_positions.reserve(dep.lines.size());
  dep.activated.reserve(dep.lines.size());

  for (const Line& line : dep.lines) {
    auto pas = sample_pa_positions(line, config.pa_density, config.disk_radius, rng);
    std::size_t redraws = 0;
    while (pas.empty()) {
      // rho == radius exactly has measure zero; a bounded loop still guards it.
      if (++redraws > kMaxChordRedraws) {
        throw std::runtime_error("sample_deployment: chord never received a PA");
      }
      pas = sample_pa_positions(line, config.pa_density, config.disk_radius, rng);
    }
    dep.resampled_chords += redraws;

    const auto nearest = std::min_element(pas.begin(), pas.end(), [&](Point2 a, Point2 b) {
      return distance(a, config.target) < distance(b, config.target);
    });
    dep.activated.push_back(static_cast<std::size_t>(nearest - pas.begin()));
    dep.pa_positions.push_back(std::move(pas));
  }
  return dep;
}

double rho_k_pdf(double x, int k, double line_density) {
  if (!(x > 0.0) || k < 1) throw std::domain_error("rho_k_pdf: requires x > 0 and k >= 1");
  const double z = 2.0 * std::numbers::pi * line_density * x;
  return std::exp(-z + k * std::log(z) - std::log(x) - std::lgamma(static_cast<double>(k)));
}

double rho_k_cdf(double x, int k, double line_density) {
  if (!(x > 0.0) || k < 1) throw std::domain_error("rho_k_cdf: requires x > 0 and k >= 1");
  // 1 - e^{-z} sum_{n<k} z^n / n! is the regularized lower incomplete gamma P(k, z).
  return boost::math::gamma_p(static_cast<double>(k), 2.0 * std::numbers::pi * line_density * x);
}

double d_cond_pdf(double r, double rho, double pa_density) {
  if (rho < 0.0 || r < rho) throw std::domain_error("d_cond_pdf: requires r >= rho >= 0");
  const double u = std::sqrt((r - rho) * (r + rho));
  if (u == 0.0) return rho > 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * pa_density;
  return 2.0 * pa_density * r / u * std::exp(-2.0 * pa_density * u);
}

double d_cond_cdf(double r, double rho, double pa_density) {
  if (rho < 0.0 || r < rho) throw std::domain_error("d_cond_cdf: requires r >= rho >= 0");
  const double u = std::sqrt((r - rho) * (r + rho));
  return -std::expm1(-2.0 * pa_density * u);
}

}  // namespace pinchloc
