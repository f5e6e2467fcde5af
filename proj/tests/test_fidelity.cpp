// Closed-form approximations against direct simulation of the same quantity.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "pinchloc/analysis.hpp"
#include "pinchloc/experiments.hpp"

using namespace pinchloc;

namespace {

// Distance from the origin to the nearest PA of a waveguide at perpendicular
// distance rho; chords without a PA are redrawn like in sample_deployment.
double nearest_pa_distance(double rho, const NetworkConfig& config, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const Line line{rho, angle(rng)};
  while (true) {
    const auto pas = sample_pa_positions(line, config.pa_density, config.disk_radius, rng);
    if (pas.empty()) continue;
    double best = 1e300;
    for (const Point2& p : pas) best = std::min(best, norm(p));
    return best;
  }
}

}  // namespace

TEST(Fidelity, ExpectedSinrMatchesMonteCarloMean) {
  const ReferenceSetup ref = default_paper_config();
  const double analytic = expected_sinr(5, ref.config, ref.params);
  const MeanEstimate mc = mc_expected_sinr(5, ref.config, ref.params, 100000, ref.config.seed);
  RecordProperty("analytic", std::to_string(analytic));
  RecordProperty("monte_carlo", std::to_string(mc.mean));
  std::printf("expected_sinr(5) analytic=%.6g monte_carlo=%.6g ratio=%.3f\n", analytic, mc.mean, analytic / mc.mean);
  EXPECT_NEAR(analytic / mc.mean, 1.0, 0.10);
}

TEST(Fidelity, ExpectedInterferenceMatchesConditionalMean) {
  const ReferenceSetup ref = default_paper_config();
  const NetworkConfig& config = ref.config;
  const double alpha = ref.params.alpha;
  const int K = 5;
  const double rho1 = 2.0;
  const double rhoK = 10.0;
  const double d11 = 3.0;

  Rng rng = replication_stream(ref.config.seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::poisson_distribution<int> outer_count(2.0 * std::numbers::pi * config.line_density * (config.disk_radius - rhoK));
  constexpr int kRuns = 100000;
  double sum = 0.0;
  for (int run = 0; run < kRuns; ++run) {
    double total = std::pow(d11, -alpha);
    for (int i = 0; i < K - 2; ++i) {
      const double rho = std::sqrt(rho1 * rho1 + unit(rng) * (rhoK * rhoK - rho1 * rho1));
      total += std::pow(nearest_pa_distance(rho, config, rng), -alpha);
    }
    for (int n = outer_count(rng); n > 0; --n) {
      const double rho = rhoK + unit(rng) * (config.disk_radius - rhoK);
      total += std::pow(nearest_pa_distance(rho, config, rng), -alpha);
    }
    sum += total;
  }
  const double mc = sum / kRuns;
  const double analytic = expected_interference(d11, rho1, rhoK, K, config.line_density, config.disk_radius, alpha);
  RecordProperty("analytic", std::to_string(analytic));
  RecordProperty("monte_carlo", std::to_string(mc));
  std::printf("expected_interference analytic=%.6g monte_carlo=%.6g ratio=%.3f\n", analytic, mc, analytic / mc);
  EXPECT_GT(analytic / mc, 0.5);
  EXPECT_LT(analytic / mc, 2.0);
}
