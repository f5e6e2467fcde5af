#include "pinchloc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinchloc {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

ProbabilityEstimate wilson_estimate(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("wilson_estimate: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {p, half, successes, trials};
}

MeanEstimate mean_estimate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_estimate: empty sample");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, kZ95 * std::sqrt(var / n), values.size()};
}

double empirical_cdf(std::span<const double> sorted, double x) {
  if (sorted.empty()) return 0.0;
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

}  // namespace pinchloc
