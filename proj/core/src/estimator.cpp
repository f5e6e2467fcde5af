#include "pinchloc/estimator.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pinchloc/analysis.hpp"
#include "pinchloc/crlb.hpp"
#include "pinchloc/parallel.hpp"
#include "pinchloc/random.hpp"

namespace pinchloc {

namespace {

constexpr int kGridSteps = 60;
constexpr int kMaxIterations = 100;
constexpr double kGradientTolerance = 1e-8;
constexpr double kMinSeparation = 1e-9;

struct Normal2 {
  double jtj_xx = 0.0;
  double jtj_yy = 0.0;
  double jtj_xy = 0.0;
  double g_x = 0.0;  // J^T e
  double g_y = 0.0;
};

Normal2 normal_equations(const EstimationProblem& problem, Point2 p) {
  Normal2 n;
  for (std::size_t i = 0; i < problem.anchors.size(); ++i) {
    const Point2 delta = p - problem.anchors[i];
    const double d2 = delta.x * delta.x + delta.y * delta.y;
    const double e = problem.samples[i].value + 0.5 * problem.alpha * std::log(d2);
    const double jx = problem.alpha * delta.x / d2;
    const double jy = problem.alpha * delta.y / d2;
    n.jtj_xx += jx * jx;
    n.jtj_yy += jy * jy;
    n.jtj_xy += jx * jy;
    n.g_x += jx * e;
    n.g_y += jy * e;
  }
  return n;
}

struct TrialOutcome {
  double squared_error = 0.0;
  double crlb = 0.0;
  std::size_t sparse = 0;
  std::size_t degenerate = 0;
  bool unconverged = false;
};

}  // namespace

void EstimationProblem::validate() const {
  std::ostringstream bad;
  if (samples.size() < 3) bad << " samples(<3)";
  if (anchors.size() != samples.size()) bad << " anchors(size)";
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    for (std::size_t j = i + 1; j < anchors.size(); ++j) {
      if (anchors[i] == anchors[j]) {
        bad << " anchors(duplicate)";
        i = anchors.size();
        break;
      }
    }
  }
  for (const auto& s : samples) {
    if (!std::isfinite(s.value)) {
      bad << " samples(non-finite)";
      break;
    }
  }
  if (!(alpha > 0.0)) bad << " alpha";
  if (!(sigma_p_sq >= 0.0)) bad << " sigma_p_sq";
  if (!(search_radius > 0.0)) bad << " search_radius";
  if (const auto fields = bad.str(); !fields.empty()) {
    throw std::invalid_argument("invalid EstimationProblem fields:" + fields);
  }
}

bool collinear(std::span<const Point2> points) {
  if (points.size() < 3) return true;
  double mx = 0.0;
  double my = 0.0;
  for (const Point2& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (const Point2& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    syy += (p.y - my) * (p.y - my);
    sxy += (p.x - mx) * (p.y - my);
  }
  // Smallest eigenvalue of the scatter matrix against the largest.
  const double half_trace = 0.5 * (sxx + syy);
  const double root = std::sqrt(0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy);
  const double hi = half_trace + root;
  const double lo = (sxx * syy - sxy * sxy) / (hi > 0.0 ? hi : 1.0);
  return !(hi > 0.0) || lo <= 1e-12 * hi;
}

double mle_objective(const EstimationProblem& problem, Point2 p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < problem.anchors.size(); ++i) {
    const Point2 delta = p - problem.anchors[i];
    const double d2 = delta.x * delta.x + delta.y * delta.y;
    if (!(d2 > kMinSeparation * kMinSeparation)) return std::numeric_limits<double>::infinity();
    const double e = problem.samples[i].value + 0.5 * problem.alpha * std::log(d2);
    sum += e * e;
  }
  return sum;
}

Point2 mle_gradient(const EstimationProblem& problem, Point2 p) {
  const Normal2 n = normal_equations(problem, p);
  return {2.0 * n.g_x, 2.0 * n.g_y};
}

EstimateResult mle_locate(const EstimationProblem& problem) {
  problem.validate();
  if (collinear(problem.anchors)) throw UnlocalizableError("mle_locate: anchors are collinear");

  const double step = problem.search_radius / kGridSteps;
  Point2 best = problem.search_center;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = -kGridSteps; i <= kGridSteps; ++i) {
    for (int j = -kGridSteps; j <= kGridSteps; ++j) {
      if (i * i + j * j > kGridSteps * kGridSteps) continue;
      const Point2 p = problem.search_center + Point2{i * step, j * step};
      const double value = mle_objective(problem, p);
      if (value < best_value) {
        best_value = value;
        best = p;
      }
    }
  }

  EstimateResult result;
  Point2 p = best;
  double value = best_value;
  Normal2 n = normal_equations(problem, p);
  double damping = 1e-3 * 0.5 * (n.jtj_xx + n.jtj_yy);
  double grad = 2.0 * std::hypot(n.g_x, n.g_y);

  while (grad >= kGradientTolerance && result.iterations < kMaxIterations) {
    ++result.iterations;
    const double axx = n.jtj_xx + damping;
    const double ayy = n.jtj_yy + damping;
    const double det = axx * ayy - n.jtj_xy * n.jtj_xy;
    const Point2 delta{-(ayy * n.g_x - n.jtj_xy * n.g_y) / det, -(axx * n.g_y - n.jtj_xy * n.g_x) / det};
    // The target lies in the deployment disk; steps leaving it are projected back.
    Point2 trial = p + delta;
    const Point2 offset = trial - problem.search_center;
    if (const double r = norm(offset); r > problem.search_radius) {
      trial = problem.search_center + (problem.search_radius / r) * offset;
    }
    const Point2 moved = trial - p;
    const double trial_value = mle_objective(problem, trial);
    if (trial_value < value) {
      p = trial;
      value = trial_value;
      n = normal_equations(problem, p);
      grad = 2.0 * std::hypot(n.g_x, n.g_y);
      damping /= 3.0;
    } else {
      // No representable descent left: the iterate is a floating-point minimum.
      if (std::hypot(moved.x, moved.y) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + norm(p))) break;
      damping = std::max(damping * 4.0, 1e-12);
    }
  }

  result.position = p;
  result.residual = value;
  result.gradient_norm = grad;
  const bool stalled = grad >= kGradientTolerance && result.iterations < kMaxIterations;
  result.converged = grad < kGradientTolerance || stalled;
  result.warning = !result.converged;
  return result;
}

std::vector<MseRow> mse_vs_k(const NetworkConfig& config, const ChannelParams& params, const std::vector<int>& k_range,
                             std::size_t n_runs, std::uint64_t seed, const MseOptions& options) {
  config.validate();
  params.validate();
  if (n_runs < 1) throw std::invalid_argument("mse_vs_k: n_runs must be >= 1");
  for (int K : k_range) {
    if (K < 3 || K > 12) throw std::invalid_argument("mse_vs_k: K must lie in [3, 12]");
  }

  std::vector<MseRow> rows;
  for (int K : k_range) {
    MseRow row;
    row.K = K;
    if (options.sigma_p_sq) {
      row.sigma_p_sq = *options.sigma_p_sq;
      row.expected_sinr = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.expected_sinr = expected_sinr(K, config, params);
      row.sigma_p_sq = sigma_p_sq(params.alpha, row.expected_sinr);
    }
    const double sigma_p = std::sqrt(row.sigma_p_sq);
    const double sigma_rss2 = sigma_rss_sq(row.sigma_p_sq, params.alpha);

    const auto outcomes = parallel_map<TrialOutcome>(n_runs, [&](std::size_t run) {
      TrialOutcome out;
      Rng rng = replication_stream(seed, run);
      Deployment dep;
      std::vector<Point2> anchors;
      while (true) {
        dep = sample_deployment(config, rng);
        if (dep.size() < static_cast<std::size_t>(K)) {
          ++out.sparse;
          continue;
        }
        anchors.clear();
        for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) anchors.push_back(dep.activated_pa(k));
        if (collinear(anchors)) {
          ++out.degenerate;
          continue;
        }
        break;
      }

      EstimationProblem problem;
      problem.anchors = anchors;
      problem.alpha = params.alpha;
      problem.sigma_p_sq = row.sigma_p_sq;
      problem.search_radius = config.disk_radius;
      for (std::size_t k = 0; k < anchors.size(); ++k) {
        RssSample s = rss_sample(distance(anchors[k], dep.target), params.alpha, sigma_p, rng);
        s.waveguide_index = k;
        s.pa_index = dep.activated[k];
        problem.samples.push_back(s);
      }
      const EstimateResult est = mle_locate(problem);
      const Point2 err = est.position - dep.target;
      out.squared_error = err.x * err.x + err.y * err.y;
      out.unconverged = !est.converged;
      out.crlb = row.sigma_p_sq > 0.0 ? crlb_exact(fim_rss(anchors, dep.target, sigma_rss2)) : 0.0;
      return out;
    });

    std::vector<double> errors;
    errors.reserve(outcomes.size());
    double crlb_sum = 0.0;
    for (const auto& o : outcomes) {
      errors.push_back(o.squared_error);
      crlb_sum += o.crlb;
      row.sparse_redraws += o.sparse;
      row.degenerate_redraws += o.degenerate;
      row.unconverged += o.unconverged ? 1 : 0;
    }
    const MeanEstimate m = mean_estimate(errors);
    row.mse = m.mean;
    row.mse_half_width = m.half_width;
    row.crlb = crlb_sum / static_cast<double>(outcomes.size());
    row.runs = outcomes.size();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pinchloc
