#include "pinchloc/crlb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pinchloc/channel.hpp"
#include "pinchloc/quadrature.hpp"

namespace pinchloc {

namespace {

constexpr double kSingularRelative = 1e-12;
constexpr std::size_t kMinSelectionSample = 1000;

// Equal-frequency bin index of every entry; ties broken by position.
std::vector<std::size_t> rank_bins(std::span<const double> v, std::size_t bins) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<std::size_t> bin(v.size());
  for (std::size_t r = 0; r < order.size(); ++r) bin[order[r]] = r * bins / order.size();
  return bin;
}

}  // namespace

Fim2x2 fim_rss(std::span<const Point2> anchors, Point2 target, double sigma_rss_sq) {
  if (anchors.size() < 2) throw RankError("fim_rss: at least two anchors are required");
  if (!(sigma_rss_sq > 0.0)) throw std::domain_error("fim_rss: sigma_rss_sq must be positive");
  Fim2x2 fim;
  for (const Point2& anchor : anchors) {
    const Point2 delta = anchor - target;
    const double d2 = delta.x * delta.x + delta.y * delta.y;
    if (!(d2 > 0.0)) throw std::domain_error("fim_rss: anchor coincides with the target");
    const double d4 = d2 * d2;
    fim.a += delta.x * delta.x / d4;
    fim.b += delta.y * delta.y / d4;
    fim.c += delta.x * delta.y / d4;
  }
  fim.a /= sigma_rss_sq;
  fim.b /= sigma_rss_sq;
  fim.c /= sigma_rss_sq;
  return fim;
}

double crlb_exact(const Fim2x2& fim) {
  const double det = fim.determinant();
  const double scale = fim.trace();
  if (!(scale > 0.0) || !(det > kSingularRelative * scale * scale)) {
    throw UnlocalizableError("crlb_exact: singular Fisher information (degenerate geometry)");
  }
  return scale / det;
}

double crlb_approx(int M, int K, double sigma_rss_sq, double d_star) {
  if (K < 2) throw std::domain_error("crlb_approx: requires K >= 2");
  if (M < 1) throw std::domain_error("crlb_approx: requires M >= 1");
  if (!(d_star > 0.0)) throw std::domain_error("crlb_approx: requires d_star > 0");
  return sigma_rss_sq * 4.0 * d_star * d_star / (M * (K - 1.0));
}

double d_star_cdf(double t, double line_density, double pa_density) {
  if (!(t > 0.0)) return 0.0;
  // rho = t sin(phi) keeps sqrt(t^2 - rho^2) = t cos(phi) smooth at the upper end.
  auto integrand = [&](double phi) {
    const double rho = t * std::sin(phi);
    const double density = 2.0 * std::numbers::pi * line_density * std::exp(-2.0 * std::numbers::pi * line_density * rho);
    return density * -std::expm1(-2.0 * pa_density * t * std::cos(phi)) * t * std::cos(phi);
  };
  // Lines beyond 40 decay lengths carry less than e^-40 of the mass.
  const double rho_cap = 40.0 / (2.0 * std::numbers::pi * line_density);
  const double phi_max = rho_cap < t ? std::asin(rho_cap / t) : std::numbers::pi / 2.0;
  const QuadratureTolerance tol{1e-12, 1e-10, 20};
  return std::clamp(integrate_adaptive(integrand, 0.0, phi_max, tol, "d_star_cdf"), 0.0, 1.0);
}

double crlb_cdf(double s, int M, int K, double sigma_p_sq, double alpha, double line_density, double pa_density) {
  if (!(s > 0.0)) throw std::domain_error("crlb_cdf: requires s > 0");
  if (K < 2 || M < 1) throw std::domain_error("crlb_cdf: requires K >= 2 and M >= 1");
  if (!(sigma_p_sq > 0.0)) throw std::domain_error("crlb_cdf: requires sigma_p_sq > 0");
  const double sigma_rss = std::sqrt(sigma_p_sq) / alpha;
  const double reach = std::sqrt(s * M * (K - 1.0)) / (2.0 * sigma_rss);
  return d_star_cdf(reach, line_density, pa_density);
}

std::vector<Point2> multi_pa_anchors(const Deployment& dep, int K, int M) {
  if (K < 1 || M < 1) throw std::invalid_argument("multi_pa_anchors: requires K >= 1 and M >= 1");
  if (dep.size() < static_cast<std::size_t>(K)) {
    throw std::invalid_argument("multi_pa_anchors: deployment has fewer than K waveguides");
  }
  std::vector<Point2> anchors;
  anchors.reserve(static_cast<std::size_t>(K * M));
  for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
    const auto pas = dep.nearest_pas(k, static_cast<std::size_t>(M));
    if (pas.size() < static_cast<std::size_t>(M)) {
      throw std::invalid_argument("multi_pa_anchors: waveguide has fewer than M PAs");
    }
    anchors.insert(anchors.end(), pas.begin(), pas.end());
  }
  return anchors;
}

CrlbReport deployment_crlb(const Deployment& dep, int K, int M, double sigma_rss_sq) {
  const auto anchors = multi_pa_anchors(dep, K, M);
  CrlbReport report;
  report.K = K;
  report.M = M;
  report.sigma_rss_sq = sigma_rss_sq;
  report.d_star = dep.activated_distance(0);
  report.exact = crlb_exact(fim_rss(anchors, dep.target, sigma_rss_sq));
  report.approx = crlb_approx(M, K, sigma_rss_sq, report.d_star);
  return report;
}

double mutual_information(std::span<const double> x, std::span<const double> y, std::size_t bins) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("mutual_information: size mismatch");
  const std::size_t n = x.size();
  if (bins == 0) bins = std::max<std::size_t>(2, static_cast<std::size_t>(std::cbrt(static_cast<double>(n))));
  const auto bx = rank_bins(x, bins);
  const auto by = rank_bins(y, bins);

  std::vector<double> joint(bins * bins, 0.0);
  std::vector<double> px(bins, 0.0);
  std::vector<double> py(bins, 0.0);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    joint[bx[i] * bins + by[i]] += w;
    px[bx[i]] += w;
    py[by[i]] += w;
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) {
      const double p = joint[i * bins + j];
      if (p > 0.0) mi += p * std::log2(p / (px[i] * py[j]));
    }
  }
  return mi;
}

DStarSelection select_by_mutual_information(std::span<const double> determinants,
                                            const std::vector<std::vector<double>>& candidate_columns,
                                            const std::vector<std::pair<int, int>>& labels) {
  if (candidate_columns.empty() || candidate_columns.size() != labels.size()) {
    throw std::invalid_argument("select_by_mutual_information: candidates and labels disagree");
  }
  const auto [lo, hi] = std::minmax_element(determinants.begin(), determinants.end());
  if (determinants.empty() || *lo == *hi) throw SelectionError("select_d_star: determinant sample is constant");

  DStarSelection selection;
  selection.samples_used = determinants.size();
  for (std::size_t c = 0; c < candidate_columns.size(); ++c) {
    selection.candidates.push_back(
        {labels[c].first, labels[c].second, mutual_information(determinants, candidate_columns[c])});
  }
  // max_element keeps the first of equal maxima.
  selection.chosen = *std::max_element(
      selection.candidates.begin(), selection.candidates.end(),
      [](const DStarCandidate& a, const DStarCandidate& b) { return a.mutual_information < b.mutual_information; });
  return selection;
}

DStarSelection select_d_star(std::span<const Deployment> deployments, int M, int K) {
  if (K < 2 || M < 1) throw std::domain_error("select_d_star: requires K >= 2 and M >= 1");
  std::vector<std::pair<int, int>> labels;
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) labels.emplace_back(k, m);
  }
  std::vector<double> determinants;
  std::vector<std::vector<double>> columns(labels.size());
  for (const Deployment& dep : deployments) {
    if (dep.size() < static_cast<std::size_t>(K)) continue;
    bool enough = true;
    for (std::size_t k = 0; k < static_cast<std::size_t>(K) && enough; ++k) {
      enough = dep.pa_positions[k].size() >= static_cast<std::size_t>(M);
    }
    if (!enough) continue;

    const auto anchors = multi_pa_anchors(dep, K, M);
    Fim2x2 fim;
    try {
      fim = fim_rss(anchors, dep.target, 1.0);
    } catch (const std::domain_error&) {
      continue;
    }
    determinants.push_back(fim.determinant());
    for (std::size_t c = 0; c < anchors.size(); ++c) columns[c].push_back(distance(anchors[c], dep.target));
  }
  if (determinants.size() < kMinSelectionSample) {
    throw std::invalid_argument("select_d_star: fewer than 1000 usable deployments");
  }
  return select_by_mutual_information(determinants, columns, labels);
}

double crlb_tdoa(std::span<const double> angles, double sigma_tau_sq) {
  if (angles.size() < 3) throw std::domain_error("crlb_tdoa: requires K >= 3 bearings");
  double denom = 0.0;
  for (std::size_t k = 1; k < angles.size(); ++k) {
    const double c = std::cos(angles[k]);
    denom += 1.0 + c * c - 2.0 * c;
  }
  if (!(denom > 0.0)) throw UnlocalizableError("crlb_tdoa: bearings carry no information");
  return sigma_tau_sq * 2.0 * (angles.size() - 1.0) / denom;
}

std::vector<double> tdoa_angles(const Deployment& dep, int K) {
  if (K < 1 || dep.size() < static_cast<std::size_t>(K)) {
    throw std::invalid_argument("tdoa_angles: deployment has fewer than K waveguides");
  }
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(K));
  for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
    const Point2 v = dep.target - dep.activated_pa(k);
    angles.push_back(std::atan2(v.y, v.x));
  }
  return angles;
}

double default_range_variance(double expected_sinr, double bandwidth_hz) {
  if (!(expected_sinr > 0.0) || !(bandwidth_hz > 0.0)) {
    throw std::domain_error("default_range_variance: SNR and bandwidth must be positive");
  }
  return kSpeedOfLight * kSpeedOfLight /
         (8.0 * std::numbers::pi * std::numbers::pi * bandwidth_hz * bandwidth_hz * expected_sinr);
}

std::vector<Point2> ula_anchors(const UlaConfig& ula) {
  if (ula.n_elements < 2) throw std::domain_error("ula_anchors: requires at least two elements");
  const Point2 axis{std::cos(ula.axis_angle), std::sin(ula.axis_angle)};
  std::vector<Point2> anchors;
  anchors.reserve(static_cast<std::size_t>(ula.n_elements));
  for (int i = 0; i < ula.n_elements; ++i) {
    const double offset = (i - 0.5 * (ula.n_elements - 1)) * ula.element_spacing;
    anchors.push_back(ula.center + offset * axis);
  }
  return anchors;
}

double crlb_ula_baseline(const UlaConfig& ula, Point2 target, double sigma_rss_sq) {
  const auto anchors = ula_anchors(ula);
  return crlb_exact(fim_rss(anchors, target, sigma_rss_sq));
}

}  // namespace pinchloc
