#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pinchloc {

/// Monte Carlo probability with a Wilson 95% interval half-width.
struct ProbabilityEstimate {
  double value = 0.0;
  double half_width = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
};

/// Sample mean with a normal-approximation 95% half-width.
struct MeanEstimate {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t count = 0;
};

ProbabilityEstimate wilson_estimate(std::size_t successes, std::size_t trials);

MeanEstimate mean_estimate(std::span<const double> values);

/// Fraction of `sorted` that is <= x. `sorted` must be ascending.
double empirical_cdf(std::span<const double> sorted, double x);

double median(std::vector<double> values);

double quantile(std::vector<double> values, double q);

}  // namespace pinchloc
