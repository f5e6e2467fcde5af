#include "pinchloc/quadrature.hpp"

#include <numbers>
#include <stdexcept>

namespace pinchloc {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(unsigned n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (unsigned k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendreRule gauss_legendre(unsigned n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (unsigned i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // half of the [-1, 1] weight
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendreRule& gauss_legendre_32() {
  static const GaussLegendreRule rule = gauss_legendre(32);
  return rule;
}

}  // namespace pinchloc
