#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "pinchloc/geometry.hpp"
#include "pinchloc/types.hpp"

namespace pinchloc {

/// Symmetric 2x2 Fisher information [a c; c b] of the target coordinates,
/// already scaled by 1 / sigma_RSS^2.
struct Fim2x2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double determinant() const { return a * b - c * c; }
  double trace() const { return a + b; }
};

struct CrlbReport {
  double exact = 0.0;   ///< m^2
  double approx = 0.0;  ///< m^2
  double d_star = 0.0;  ///< m
  int K = 0;
  int M = 0;
  double sigma_rss_sq = 0.0;
};

/// sigma_RSS^2 = sigma_p^2 / alpha^2.
inline double sigma_rss_sq(double sigma_p_sq, double alpha) { return sigma_p_sq / (alpha * alpha); }

/// RSS Fisher information for log-distance measurements from `anchors`.
/// Throws RankError with fewer than two anchors, std::domain_error if an
/// anchor coincides with the target.
Fim2x2 fim_rss(std::span<const Point2> anchors, Point2 target, double sigma_rss_sq);

/// trace(FIM^{-1}). Throws UnlocalizableError for a singular FIM.
double crlb_exact(const Fim2x2& fim);

/// sigma_RSS^2 * 4 d_*^2 / (M (K - 1)).
double crlb_approx(int M, int K, double sigma_rss_sq, double d_star);

/// CDF of the nearest-PA distance on the nearest waveguide, rho_1 marginalized.
double d_star_cdf(double t, double line_density, double pa_density);

/// P(CRLB_approx <= s) with d_* the nearest PA on the nearest waveguide.
double crlb_cdf(double s, int M, int K, double sigma_p_sq, double alpha, double line_density, double pa_density);

/// Anchors for the multi-PA FIM: the M nearest PAs on each of the K nearest waveguides.
/// Throws std::invalid_argument if the deployment cannot supply them.
std::vector<Point2> multi_pa_anchors(const Deployment& dep, int K, int M);

/// Exact and approximate CRLB of one deployment (d_* = d_{1,1}).
CrlbReport deployment_crlb(const Deployment& dep, int K, int M, double sigma_rss_sq);

/// Histogram estimate (equal-frequency bins, bits) of I(X; Y).
double mutual_information(std::span<const double> x, std::span<const double> y, std::size_t bins = 0);

struct DStarCandidate {
  int k = 0;  ///< 0-based waveguide rank
  int m = 0;  ///< 0-based PA rank on that waveguide
  double mutual_information = 0.0;
};

struct DStarSelection {
  DStarCandidate chosen;
  std::vector<DStarCandidate> candidates;
  std::size_t samples_used = 0;
};

/// Candidate maximizing I(D; candidate); ties go to the earliest candidate.
/// Throws SelectionError if `determinants` is constant.
DStarSelection select_by_mutual_information(std::span<const double> determinants,
                                            const std::vector<std::vector<double>>& candidate_columns,
                                            const std::vector<std::pair<int, int>>& labels);

/// Picks d_* among d_{k,m} (k < K, m < M) by maximizing I(D; d_{k,m}) with
/// D = A B - C^2 of the multi-PA FIM. Deployments lacking K waveguides or
/// M PAs per waveguide are skipped; at least 1000 must remain.
DStarSelection select_d_star(std::span<const Deployment> deployments, int M, int K);

/// Approximate TDoA CRLB from the PA-to-target bearings (first entry is the reference).
double crlb_tdoa(std::span<const double> angles, double sigma_tau_sq);

/// Bearings from the activated PA of each of the K nearest waveguides to the target.
std::vector<double> tdoa_angles(const Deployment& dep, int K);

/// Ranging variance placeholder c^2 / (8 pi^2 B^2 SNR).
double default_range_variance(double expected_sinr, double bandwidth_hz = 100e6);

struct UlaConfig {
  int n_elements = 8;
  double element_spacing = 0.5 * 299'792'458.0 / 28e9;  ///< half wavelength at 28 GHz
  Point2 center{15.0, 0.0};
  double axis_angle = std::numbers::pi / 2.0;  ///< array axis direction, rad
};

std::vector<Point2> ula_anchors(const UlaConfig& ula);

/// CRLB of the fixed linear array. Throws UnlocalizableError when the target
/// is collinear with the array.
double crlb_ula_baseline(const UlaConfig& ula, Point2 target, double sigma_rss_sq);

}  // namespace pinchloc
