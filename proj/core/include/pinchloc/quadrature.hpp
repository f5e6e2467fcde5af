#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "pinchloc/types.hpp"

namespace pinchloc {

struct QuadratureTolerance {
  double absolute = 1e-6;
  double relative = 1e-4;
  unsigned max_depth = 15;
};

/// Adaptive Gauss-Kronrod (15/31) on [a, b]. Throws ConvergenceError when the
/// error estimate exceeds max(absolute, relative * |I|).
template <class F>
double integrate_adaptive(F&& f, double a, double b, const QuadratureTolerance& tol, const char* what) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double error = 0.0;
  double l1 = 0.0;
  // Boost only takes a relative target; a one-level probe converts the
  // absolute floor so small integrals are not refined below it.
  Rule::integrate(f, a, b, 0, tol.relative, &error, &l1);
  const double relative = l1 > 0.0 ? std::max(tol.relative, tol.absolute / l1) : tol.relative;
  const double value = Rule::integrate(std::forward<F>(f), a, b, tol.max_depth, relative, &error, &l1);
  const double budget = std::max(tol.absolute, tol.relative * std::abs(value));
  if (!std::isfinite(value) || error > budget) {
    throw ConvergenceError(std::string(what) + ": quadrature error estimate " + std::to_string(error) +
                               " exceeds tolerance " + std::to_string(budget),
                           error, value);
  }
  return value;
}

/// Tanh-sinh on [a, b] for integrands with endpoint derivative singularities.
/// Same error contract as `integrate_adaptive`.
template <class F>
double integrate_endpoint(F&& f, double a, double b, const QuadratureTolerance& tol, const char* what) {
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(tol.max_depth);
  double error = 0.0;
  double l1 = 0.0;
  // The reported error is the gap between the last two levels, so the rule is
  // asked for one more level than the budget needs.
  const double value = rule.integrate(std::forward<F>(f), a, b, 0.1 * tol.relative, &error, &l1);
  const double budget = std::max(tol.absolute, tol.relative * std::abs(value));
  if (!std::isfinite(value) || error > budget) {
    throw ConvergenceError(std::string(what) + ": quadrature error estimate " + std::to_string(error) +
                               " exceeds tolerance " + std::to_string(budget),
                           error, value);
  }
  return value;
}

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point rule; nodes by Newton iteration on P_n.
GaussLegendreRule gauss_legendre(unsigned n);

/// Shared 32-point rule.
const GaussLegendreRule& gauss_legendre_32();

}  // namespace pinchloc
