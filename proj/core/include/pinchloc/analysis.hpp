#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "pinchloc/channel.hpp"
#include "pinchloc/geometry.hpp"
#include "pinchloc/quadrature.hpp"
#include "pinchloc/stats.hpp"

namespace pinchloc {

/// Dominant-interference approximation of the mean interference seen by the
/// K-th nearest waveguide's PA: the nearest waveguide keeps its random
/// distance d11, waveguides 2..K-1 and those beyond rho_K enter through
/// their means. alpha == 2 uses the logarithmic branch.
///
/// Throws std::domain_error unless 0 < rho1 < rhoK, d11 >= rho1, K >= 2 and alpha >= 2.
double expected_interference(double d11, double rho1, double rhoK, int K, double line_density, double disk_radius,
                             double alpha);

struct LocalizabilityQuery {
  int K = 3;
  double tau = 1.0;  ///< linear SINR threshold
  NetworkConfig config{};
  ChannelParams params{};
  QuadratureTolerance quadrature{};

  void validate() const;
};

/// Closed-form probability that the K-th nearest waveguide's PA clears tau.
/// Outer integral over rho_K, rho_1 marginalized by its order-statistic law
/// given rho_K, d11 over its conditional law. Throws ConvergenceError.
double localizability(const LocalizabilityQuery& query);

/// Integral of a complementary CDF over [0, inf): log-spaced adaptive
/// quadrature above 1e-4, a power-law tail estimate bounding truncation.
double integrate_tail(const std::function<double(double)>& tail, const QuadratureTolerance& tol = {});

/// E{SINR_K} as the integral of the closed-form localizability over tau.
double expected_sinr(int K, const NetworkConfig& config, const ChannelParams& params,
                     const QuadratureTolerance& tol = {});

/// SINR of the K-th nearest waveguide (1-based K) in each of n_runs
/// independent deployments; 0 when a deployment has fewer than K lines.
std::vector<double> sample_sinr_k(int K, const NetworkConfig& config, const ChannelParams& params,
                                  std::size_t n_runs, std::uint64_t seed);

/// Empirical P(SINR_K >= tau) with a Wilson half-width.
ProbabilityEstimate mc_localizability(int K, double tau, const NetworkConfig& config, const ChannelParams& params,
                                      std::size_t n_runs, std::uint64_t seed);

ProbabilityEstimate mc_localizability(std::span<const double> sinr_draws, double tau);

MeanEstimate mc_expected_sinr(int K, const NetworkConfig& config, const ChannelParams& params, std::size_t n_runs,
                              std::uint64_t seed);

}  // namespace pinchloc
