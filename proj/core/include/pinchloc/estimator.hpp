#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pinchloc/channel.hpp"
#include "pinchloc/geometry.hpp"
#include "pinchloc/types.hpp"

namespace pinchloc {

struct EstimationProblem {
  std::vector<RssSample> samples;
  std::vector<Point2> anchors;  ///< anchors[i] transmitted samples[i]
  double alpha = 2.1;
  double sigma_p_sq = 0.0;
  double search_radius = 30.0;  ///< coarse grid covers this disk
  Point2 search_center{};

  void validate() const;
};

struct EstimateResult {
  Point2 position{};
  int iterations = 0;
  double residual = 0.0;       ///< objective at `position`
  double gradient_norm = 0.0;  ///< |grad objective| at `position`
  bool converged = false;
  bool warning = false;        ///< refinement hit the iteration cap
};

/// sum_k (r_k + alpha ln |p - a_k|)^2; +inf when p sits on an anchor.
double mle_objective(const EstimationProblem& problem, Point2 p);

/// Analytic gradient of `mle_objective`.
Point2 mle_gradient(const EstimationProblem& problem, Point2 p);

/// Maximum-likelihood position over the search disk: coarse grid (step
/// radius/60) then damped Gauss-Newton with steps projected onto the disk.
/// Throws UnlocalizableError for collinear anchors.
EstimateResult mle_locate(const EstimationProblem& problem);

struct MseRow {
  int K = 0;
  double mse = 0.0;             ///< m^2
  double mse_half_width = 0.0;  ///< 95% normal interval
  double crlb = 0.0;            ///< mean exact CRLB over the same deployments, m^2
  double expected_sinr = 0.0;
  double sigma_p_sq = 0.0;
  std::size_t runs = 0;
  std::size_t sparse_redraws = 0;      ///< deployments with fewer than K waveguides
  std::size_t degenerate_redraws = 0;  ///< deployments with collinear anchors
  std::size_t unconverged = 0;
};

struct MseOptions {
  /// Replaces the sigma_p^2 derived from the closed-form E{SINR_K}.
  std::optional<double> sigma_p_sq;
};

/// MSE of the MLE for each K in `k_range` (each within [3, 12]). Deployments
/// are paired across K through per-run streams.
std::vector<MseRow> mse_vs_k(const NetworkConfig& config, const ChannelParams& params, const std::vector<int>& k_range,
                             std::size_t n_runs, std::uint64_t seed, const MseOptions& options = {});

/// True when all points lie on one line (to relative tolerance).
bool collinear(std::span<const Point2> points);

}  // namespace pinchloc
