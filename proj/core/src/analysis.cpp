#include "pinchloc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "pinchloc/parallel.hpp"
#include "pinchloc/random.hpp"

namespace pinchloc {

namespace {

constexpr double kTauFloor = 1e-4;
constexpr double kTailProbability = 1e-4;
constexpr double kTailShare = 1e-3;
constexpr double kTauCeiling = 1e12;

// (b^{2-a} - c^{2-a}) / (2 - a), continuous through a = 2 where it becomes ln(b / c).
double power_difference_over_exponent(double b, double c, double alpha) {
  const double e = 2.0 - alpha;
  const double log_ratio = std::log(b / c);
  if (e == 0.0) return log_ratio;
  return std::pow(c, e) * std::expm1(e * log_ratio) / e;
}

}  // namespace

double expected_interference(double d11, double rho1, double rhoK, int K, double line_density, double disk_radius,
                             double alpha) {
  if (!(rho1 > 0.0) || !(rho1 < rhoK)) throw std::domain_error("expected_interference: requires 0 < rho1 < rhoK");
  if (!(d11 >= rho1)) throw std::domain_error("expected_interference: requires d11 >= rho1");
  if (K < 2) throw std::domain_error("expected_interference: requires K >= 2");
  if (!(alpha >= 2.0)) throw std::domain_error("expected_interference: alpha < 2 makes the outer interference diverge");

  const double nearest = std::pow(d11, -alpha);
  // Waveguides 2..K-1 at perpendicular distance r with density 2r / (rhoK^2 - rho1^2).
  const double middle =
      2.0 * (K - 2) * power_difference_over_exponent(rhoK, rho1, alpha) / ((rhoK - rho1) * (rhoK + rho1));
  double outer = 0.0;
  if (alpha == 2.0) {
    outer = 2.0 * std::numbers::pi * line_density * std::log(disk_radius / rhoK);
  } else {
    outer = 2.0 * std::numbers::pi * line_density / (alpha - 2.0) * std::pow(rhoK, 2.0 - alpha);
  }
  return nearest + middle + outer;
}

void LocalizabilityQuery::validate() const {
  std::ostringstream bad;
  if (K < 2) bad << " K";
  if (!(tau > 0.0)) bad << " tau";
  if (!(quadrature.absolute > 0.0) || !(quadrature.relative > 0.0)) bad << " quadrature";
  if (const auto fields = bad.str(); !fields.empty()) {
    throw std::invalid_argument("invalid LocalizabilityQuery fields:" + fields);
  }
  config.validate();
  params.validate();
}

double localizability(const LocalizabilityQuery& query) {
  query.validate();
  const int K = query.K;
  const double tau = query.tau;
  const double alpha = query.params.alpha;
  const double noise = query.params.normalized_noise();
  const double lambda_l = query.config.line_density;
  const double lambda_s = query.config.pa_density;
  const double radius = query.config.disk_radius;
  const auto& tol = query.quadrature;

  // P(d_{K,1} below the SINR-driven radius | rho_K), averaged over d11 given rho_1.
  // d_{K,1} enters only through this CDF; its own density integrates to one.
  auto over_d11 = [&](double rho1, double rhoK) {
    // Interference without the serving term; the reach exceeds rho_K only once
    // d11^{-alpha} drops below `slack`, so the integral starts there.
    const double rest = expected_interference(std::numeric_limits<double>::infinity(), rho1, rhoK, K, lambda_l,
                                              radius, alpha);
    const double slack = std::pow(rhoK, -alpha) / tau - noise - rest;
    if (!(slack > 0.0)) return 0.0;
    const double d_min = std::pow(slack, -1.0 / alpha);
    const double u_min = d_min > rho1 ? std::sqrt((d_min - rho1) * (d_min + rho1)) : 0.0;
    const double v_min = -std::expm1(-2.0 * lambda_s * u_min);
    if (!(v_min < 1.0)) return 0.0;

    // v = v_min + (1 - v_min) w^2 absorbs the square-root onset at v_min.
    const double span = 1.0 - v_min;
    auto integrand = [&](double w) {
      // u = sqrt(d11^2 - rho1^2) is exponential with rate 2 lambda_s; v is its CDF.
      const double v = v_min + span * w * w;
      const double u = -std::log1p(-v) / (2.0 * lambda_s);
      const double d11 = std::sqrt(rho1 * rho1 + u * u);
      const double interference = expected_interference(d11, rho1, rhoK, K, lambda_l, radius, alpha);
      const double reach = std::pow(tau * (interference + noise), -1.0 / alpha);
      return reach > rhoK ? 2.0 * span * w * d_cond_cdf(reach, rhoK, lambda_s) : 0.0;
    };
    return integrate_endpoint(integrand, 0.0, 1.0, tol, "localizability (d11)");
  };

  // rho_1 given rho_K is the minimum of K-1 uniforms on (0, rho_K).
  auto over_rho1 = [&](double rhoK) {
    auto integrand = [&](double t) {
      const double weight = (K - 1) * std::pow(1.0 - t, K - 2);
      return weight * over_d11(t * rhoK, rhoK);
    };
    return gauss_legendre_32().integrate(integrand);
  };

  auto outer = [&](double rhoK) { return rho_k_pdf(rhoK, K, lambda_l) * over_rho1(rhoK); };
  const double p = integrate_adaptive(outer, 0.0, radius, tol, "localizability (rho_K)");
  return std::clamp(p, 0.0, 1.0);
}

double integrate_tail(const std::function<double(double)>& tail, const QuadratureTolerance& tol) {
  // Below the floor the tail is integrated on a linear scale.
  double total = integrate_adaptive(tail, 0.0, kTauFloor, tol, "expected SINR (floor)");

  auto log_integrand = [&](double s) {
    const double t = std::exp(s);
    return tail(t) * t;
  };

  double lo = kTauFloor;
  double hi = 1.0;
  double p_hi = tail(hi);
  while (true) {
    while (p_hi >= kTailProbability) {
      if (hi >= kTauCeiling) throw ConvergenceError("expected SINR: tail does not decay", p_hi, total);
      hi *= 10.0;
      p_hi = tail(hi);
    }
    total += integrate_adaptive(log_integrand, std::log(lo), std::log(hi), tol, "expected SINR (log grid)");
    lo = hi;

    // Local power-law decay P ~ tau^{-beta} bounds the truncated remainder.
    double remainder = 0.0;
    if (p_hi > 0.0) {
      const double p_prev = tail(hi / 10.0);
      const double beta = std::log10(p_prev / p_hi);
      remainder = beta > 1.0 ? hi * p_hi / (beta - 1.0) : std::numeric_limits<double>::infinity();
    }
    if (remainder <= kTailShare * total) return total;
    if (hi >= kTauCeiling) throw ConvergenceError("expected SINR: tail remainder too heavy", remainder, total);
    hi *= 10.0;
    p_hi = tail(hi);
  }
}

double expected_sinr(int K, const NetworkConfig& config, const ChannelParams& params, const QuadratureTolerance& tol) {
  if (K < 2) throw std::domain_error("expected_sinr: requires K >= 2");
  LocalizabilityQuery query{K, 1.0, config, params, tol};
  query.validate();

  // Sweeps ask for the same K repeatedly; the value is a pure function of the inputs.
  using Key = std::tuple<int, double, double, double, double, double, double, double, unsigned>;
  const Key key{K,
                config.line_density,
                config.pa_density,
                config.disk_radius,
                params.alpha,
                params.normalized_noise(),
                tol.absolute,
                tol.relative,
                tol.max_depth};
  static std::mutex cache_mutex;
  static std::map<Key, double> cache;
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  // The truncation already allows a 0.1% share, so the tau integral needs no more.
  const QuadratureTolerance tail_tol{tol.absolute, std::max(tol.relative, kTailShare), tol.max_depth};
  const double value = integrate_tail(
      [&](double tau) {
        query.tau = tau;
        return localizability(query);
      },
      tail_tol);
  std::lock_guard lock(cache_mutex);
  cache.emplace(key, value);
  return value;
}

std::vector<double> sample_sinr_k(int K, const NetworkConfig& config, const ChannelParams& params,
                                  std::size_t n_runs, std::uint64_t seed) {
  if (K < 1) throw std::domain_error("sample_sinr_k: requires K >= 1");
  config.validate();
  params.validate();
  const auto k = static_cast<std::size_t>(K - 1);
  return parallel_map<double>(n_runs, [&](std::size_t i) {
    Rng rng = replication_stream(seed, i);
    const Deployment dep = sample_deployment(config, rng);
    return dep.size() > k ? sinr(dep, k, params) : 0.0;
  });
}

ProbabilityEstimate mc_localizability(std::span<const double> sinr_draws, double tau) {
  std::size_t hits = 0;
  // Inclusive so that tau = 0 admits every draw, sparse deployments included.
  for (double s : sinr_draws) hits += s >= tau ? 1 : 0;
  return wilson_estimate(hits, sinr_draws.size());
}

ProbabilityEstimate mc_localizability(int K, double tau, const NetworkConfig& config, const ChannelParams& params,
                                      std::size_t n_runs, std::uint64_t seed) {
  if (n_runs < 1) throw std::invalid_argument("mc_localizability: n_runs must be >= 1");
  const auto draws = sample_sinr_k(K, config, params, n_runs, seed);
  return mc_localizability(draws, tau);
}

MeanEstimate mc_expected_sinr(int K, const NetworkConfig& config, const ChannelParams& params, std::size_t n_runs,
                              std::uint64_t seed) {
  const auto draws = sample_sinr_k(K, config, params, n_runs, seed);
  return mean_estimate(draws);
}

}  // namespace pinchloc
