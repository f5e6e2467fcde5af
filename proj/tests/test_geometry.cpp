#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pinchloc/geometry.hpp"
#include "test_support.hpp"

using namespace pinchloc;
using pinchloc::testing::ks_distance;
using pinchloc::testing::simpson;

namespace {

NetworkConfig reference_config() {
  NetworkConfig c;
  c.line_density = 0.1 / std::numbers::pi;
  c.pa_density = 0.1;
  c.disk_radius = 30.0;
  return c;
}

}  // namespace

TEST(Plp, MeanLineCountIsSix) {
  const NetworkConfig config = reference_config();
  Rng rng(11);
  constexpr int kDraws = 20000;
  double total = 0.0;
  for (int i = 0; i < kDraws; ++i) total += static_cast<double>(sample_plp(config, rng).size());
  // Poisson(6): standard error sqrt(6 / n) ~ 0.017.
  EXPECT_NEAR(total / kDraws, 6.0, 0.07);
}

TEST(Plp, VanishingDensityGivesEmptyRealizations) {
  NetworkConfig config = reference_config();
  config.line_density = 1e-9;
  Rng rng(3);
  int empty = 0;
  for (int i = 0; i < 1000; ++i) empty += sample_plp(config, rng).empty() ? 1 : 0;
  EXPECT_EQ(empty, 1000);
}

TEST(Plp, LinesSortedAndInsideDisk) {
  const NetworkConfig config = reference_config();
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto lines = sample_plp(config, rng);
    for (std::size_t j = 0; j < lines.size(); ++j) {
      EXPECT_GE(lines[j].rho, 0.0);
      EXPECT_LE(lines[j].rho, config.disk_radius);
      EXPECT_GE(lines[j].theta, 0.0);
      EXPECT_LT(lines[j].theta, 2.0 * std::numbers::pi);
      if (j > 0) EXPECT_LE(lines[j - 1].rho, lines[j].rho);
    }
  }
}

TEST(Plp, NearestLineDistanceMatchesClosedForm) {
  const NetworkConfig config = reference_config();
  Rng rng(2024);
  std::vector<double> rho1;
  std::vector<double> rho3;
  while (rho1.size() < 100000) {
    const auto lines = sample_plp(config, rng);
    // A missing k-th line means rho_k lies beyond the disk: censored at the radius.
    rho1.push_back(lines.size() >= 1 ? lines[0].rho : 1e9);
    rho3.push_back(lines.size() >= 3 ? lines[2].rho : 1e9);
  }
  auto cdf1 = [&](double x) { return rho_k_cdf(x, 1, config.line_density); };
  auto cdf3 = [&](double x) { return rho_k_cdf(x, 3, config.line_density); };
  EXPECT_LT(ks_distance(rho1, cdf1, config.disk_radius), 0.01);
  EXPECT_LT(ks_distance(rho3, cdf3, config.disk_radius), 0.01);
}

TEST(Line, GeometryHelpers) {
  const Line line{3.0, std::numbers::pi / 2.0};
  EXPECT_NEAR(line.foot().x, 0.0, 1e-12);
  EXPECT_NEAR(line.foot().y, 3.0, 1e-12);
  EXPECT_NEAR(line.half_chord(5.0), 4.0, 1e-12);
  EXPECT_EQ(line.half_chord(2.0), 0.0);
  const Point2 p = line.at(2.5);
  EXPECT_NEAR(p.x * std::cos(line.theta) + p.y * std::sin(line.theta), 3.0, 1e-12);
}

TEST(PaPositions, MeanCountOnFortyMetreChord) {
  const Line line{std::sqrt(500.0), 0.7};  // half chord 20 in a 30 m disk
  ASSERT_NEAR(line.half_chord(30.0), 20.0, 1e-12);
  Rng rng(8);
  constexpr int kDraws = 20000;
  double total = 0.0;
  for (int i = 0; i < kDraws; ++i) total += static_cast<double>(sample_pa_positions(line, 0.1, 30.0, rng).size());
  EXPECT_NEAR(total / kDraws, 4.0, 0.05);
}

TEST(PaPositions, TangentLineHasNoChord) {
  Rng rng(1);
  EXPECT_TRUE(sample_pa_positions({30.0, 1.0}, 0.1, 30.0, rng).empty());
}

TEST(PaPositions, LineMissingDiskThrows) {
  Rng rng(1);
  EXPECT_THROW(sample_pa_positions({30.5, 1.0}, 0.1, 30.0, rng), std::domain_error);
}

TEST(PaPositions, PointsLieOnLineInsideDisk) {
  Rng rng(9);
  const Line line{12.0, 2.0};
  for (int i = 0; i < 200; ++i) {
    for (const Point2& p : sample_pa_positions(line, 0.5, 30.0, rng)) {
      EXPECT_NEAR(p.x * std::cos(line.theta) + p.y * std::sin(line.theta), line.rho, 1e-9);
      EXPECT_LE(norm(p), 30.0 + 1e-9);
    }
  }
}

TEST(Deployment, InvariantsHold) {
  const NetworkConfig config = reference_config();
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const Deployment dep = sample_deployment(config, rng);
    ASSERT_EQ(dep.pa_positions.size(), dep.size());
    ASSERT_EQ(dep.activated.size(), dep.size());
    for (std::size_t k = 0; k < dep.size(); ++k) {
      const Line& line = dep.lines[k];
      ASSERT_FALSE(dep.pa_positions[k].empty());
      for (const Point2& p : dep.pa_positions[k]) {
        EXPECT_NEAR(p.x * std::cos(line.theta) + p.y * std::sin(line.theta), line.rho, 1e-9);
        EXPECT_GE(distance(p, dep.target), dep.activated_distance(k));
      }
      EXPECT_GE(dep.activated_distance(k), line.rho - 1e-12);
    }
  }
}

TEST(Deployment, ActivatedDistancesAreNotOrderedByRho) {
  // The nearest line does not always host the nearest activated PA.
  const NetworkConfig config = reference_config();
  Rng rng(31);
  int below = 0;
  int above = 0;
  for (int i = 0; i < 5000; ++i) {
    const Deployment dep = sample_deployment(config, rng);
    if (dep.size() < 2) continue;
    (dep.activated_distance(0) <= dep.activated_distance(1) ? below : above)++;
  }
  EXPECT_GT(below, 0);
  EXPECT_GT(above, 0);
}

TEST(Deployment, SameSeedSameRealization) {
  const NetworkConfig config = reference_config();
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 50; ++i) {
    const Deployment x = sample_deployment(config, a);
    const Deployment y = sample_deployment(config, b);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      EXPECT_EQ(x.lines[k].rho, y.lines[k].rho);
      EXPECT_EQ(x.lines[k].theta, y.lines[k].theta);
      EXPECT_EQ(x.pa_positions[k], y.pa_positions[k]);
    }
  }
}

TEST(Deployment, NearestPasOrderedByDistance) {
  Deployment dep;
  dep.lines = {{0.0, 0.0}};
  dep.pa_positions = {{{0.0, -3.0}, {0.0, 1.0}, {0.0, 2.0}, {0.0, -0.5}}};
  dep.activated = {3};
  const auto pas = dep.nearest_pas(0, 3);
  ASSERT_EQ(pas.size(), 3u);
  EXPECT_EQ(pas[0], (Point2{0.0, -0.5}));
  EXPECT_EQ(pas[1], (Point2{0.0, 1.0}));
  EXPECT_EQ(pas[2], (Point2{0.0, 2.0}));
}

TEST(Config, ValidateNamesBadFields) {
  NetworkConfig config = reference_config();
  config.line_density = -1.0;
  config.disk_radius = 0.0;
  try {
    config.validate();
    FAIL() << "expected std::invalid_argument";
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line_density"), std::string::npos);
    EXPECT_NE(what.find("disk_radius"), std::string::npos);
  }
}

TEST(RhoK, ClosedFormValues) {
  const double lambda = 0.1 / std::numbers::pi;
  EXPECT_NEAR(rho_k_cdf(5.0, 1, lambda), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(rho_k_cdf(1e-12, 1, lambda), 0.0, 1e-12);
  // Erlang(k = 2): 1 - e^{-u}(1 + u) with u = 2 pi lambda x.
  const double u = 2.0 * std::numbers::pi * lambda * 7.0;
  EXPECT_NEAR(rho_k_cdf(7.0, 2, lambda), 1.0 - std::exp(-u) * (1.0 + u), 1e-12);
}

TEST(RhoK, DomainErrors) {
  EXPECT_THROW(rho_k_pdf(0.0, 1, 0.1), std::domain_error);
  EXPECT_THROW(rho_k_cdf(-1.0, 1, 0.1), std::domain_error);
  EXPECT_THROW(rho_k_pdf(1.0, 0, 0.1), std::domain_error);
}

TEST(RhoK, PdfIntegratesToOne) {
  const double lambda = 0.1 / std::numbers::pi;
  for (int k : {1, 2, 3, 5, 8}) {
    // Mass beyond 400 m is below 1e-15 for these k.
    auto pdf = [&](double x) { return x > 0.0 ? rho_k_pdf(x, k, lambda) : (k == 1 ? 2.0 * std::numbers::pi * lambda : 0.0); };
    EXPECT_NEAR(simpson(pdf, 0.0, 400.0, 200000), 1.0, 1e-6) << "k=" << k;
  }
}

TEST(RhoK, CdfDerivativeIsPdf) {
  const double lambda = 0.1 / std::numbers::pi;
  constexpr double h = 1e-5;
  for (int k : {1, 3, 6}) {
    for (double x = 0.5; x < 60.0; x += 1.7) {
      const double fd = (rho_k_cdf(x + h, k, lambda) - rho_k_cdf(x - h, k, lambda)) / (2.0 * h);
      EXPECT_NEAR(fd, rho_k_pdf(x, k, lambda), 1e-5) << "k=" << k << " x=" << x;
    }
  }
}

TEST(DCond, ClosedFormValues) {
  EXPECT_NEAR(d_cond_cdf(5.0, 3.0, 0.1), 1.0 - std::exp(-0.8), 1e-12);
  EXPECT_EQ(d_cond_cdf(3.0, 3.0, 0.1), 0.0);
  EXPECT_NEAR(d_cond_cdf(1e4, 3.0, 0.1), 1.0, 1e-12);
  EXPECT_THROW(d_cond_cdf(2.0, 3.0, 0.1), std::domain_error);
  EXPECT_THROW(d_cond_pdf(2.0, 3.0, 0.1), std::domain_error);
}

TEST(DCond, CdfNondecreasing) {
  double last = 0.0;
  for (double r = 3.0; r < 80.0; r += 0.01) {
    const double c = d_cond_cdf(r, 3.0, 0.1);
    EXPECT_GE(c, last);
    last = c;
  }
}

TEST(DCond, PdfIntegratesToOne) {
  // r = sqrt(rho^2 + u^2) removes the integrable singularity at r = rho.
  const double rho = 3.0;
  const double lambda = 0.1;
  auto in_u = [&](double u) {
    if (u == 0.0) return 2.0 * lambda;
    const double r = std::hypot(rho, u);
    return d_cond_pdf(r, rho, lambda) * u / r;
  };
  EXPECT_NEAR(simpson(in_u, 0.0, 400.0, 200000), 1.0, 1e-6);
}

TEST(DCond, CdfDerivativeIsPdf) {
  constexpr double h = 1e-6;
  for (double r = 3.2; r < 40.0; r += 0.9) {
    const double fd = (d_cond_cdf(r + h, 3.0, 0.1) - d_cond_cdf(r - h, 3.0, 0.1)) / (2.0 * h);
    EXPECT_NEAR(fd, d_cond_pdf(r, 3.0, 0.1), 1e-5) << "r=" << r;
  }
}

TEST(DCond, InfiniteLineSimulationMatches) {
  // Oracle: 1-D HPPP on a 400 m segment centred on the foot, far beyond 10 / lambda_s.
  const double rho = 3.0;
  const double lambda = 0.1;
  const double half = 200.0;
  Rng rng(99);
  std::poisson_distribution<int> count(2.0 * half * lambda);
  std::uniform_real_distribution<double> along(-half, half);
  std::vector<double> nearest;
  while (nearest.size() < 100000) {
    const int n = count(rng);
    if (n == 0) continue;
    double best = 1e300;
    for (int i = 0; i < n; ++i) best = std::min(best, std::abs(along(rng)));
    nearest.push_back(std::hypot(rho, best));
  }
  EXPECT_LT(ks_distance(nearest, [&](double r) { return d_cond_cdf(r, rho, lambda); }), 0.01);
}
