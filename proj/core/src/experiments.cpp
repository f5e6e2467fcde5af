#include "pinchloc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pinchloc/analysis.hpp"
#include "pinchloc/estimator.hpp"
#include "pinchloc/parallel.hpp"
#include "pinchloc/random.hpp"
#include "pinchloc/stats.hpp"

namespace pinchloc {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double from_db(double db) { return std::pow(10.0, db / 10.0); }

// Per-deployment CRLB factors at unit sigma_RSS^2.
struct GeometryFactors {
  double exact = 0.0;
  double approx = 0.0;
};

GeometryFactors sample_geometry(const NetworkConfig& config, std::uint64_t seed, std::size_t run) {
  const int K = config.num_waveguides;
  const int M = config.pas_per_waveguide;
  Rng rng = replication_stream(seed, run);
  while (true) {
    const Deployment dep = sample_deployment(config, rng);
    if (dep.size() < static_cast<std::size_t>(K)) continue;
    try {
      const CrlbReport r = deployment_crlb(dep, K, M, 1.0);
      return {r.exact, r.approx};
    } catch (const std::invalid_argument&) {
      // fewer than M candidate positions on a chord
    } catch (const UnlocalizableError&) {
    } catch (const std::domain_error&) {
    }
  }
}

ResultTable run_localizability(const ExperimentSpec& spec) {
  ResultTable table;
  table.columns = {spec.sweep.scale == AxisScale::db ? "tau_db" : "tau_linear", "K", "analytic_prob", "mc_prob",
                   "mc_halfwidth"};
  std::vector<std::vector<double>> draws;
  for (int K : spec.k_values) draws.push_back(sample_sinr_k(K, spec.config, spec.params, spec.n_runs, spec.config.seed));

  for (double axis : spec.sweep.values()) {
    const double tau = spec.sweep.scale == AxisScale::db ? from_db(axis) : axis;
    for (std::size_t i = 0; i < spec.k_values.size(); ++i) {
      const int K = spec.k_values[i];
      double analytic = kNaN;
      try {
        analytic = localizability({K, tau, spec.config, spec.params, {}});
      } catch (const ConvergenceError& e) {
        table.flagged.push_back({table.rows.size(), e.what()});
      }
      const ProbabilityEstimate mc = mc_localizability(draws[i], tau);
      table.rows.push_back({axis, static_cast<double>(K), analytic, mc.value, mc.half_width});
    }
  }
  return table;
}

ResultTable run_mse(const ExperimentSpec& spec) {
  ResultTable table;
  table.columns = {"K", "mse_m2", "crlb_m2"};
  std::vector<int> ks;
  for (double v : spec.sweep.values()) {
    const int K = static_cast<int>(std::lround(v));
    if (ks.empty() || ks.back() != K) ks.push_back(K);
  }
  for (const MseRow& row : mse_vs_k(spec.config, spec.params, ks, spec.n_runs, spec.config.seed)) {
    table.rows.push_back({static_cast<double>(row.K), row.mse, row.crlb});
  }
  return table;
}

ResultTable run_crlb_vs_sinr(const ExperimentSpec& spec) {
  ResultTable table;
  table.columns = {spec.sweep.scale == AxisScale::db ? "sinr_db" : "sinr_linear", "crlb_exact_m2", "crlb_approx_m2",
                   "crlb_ula_m2"};
  const auto factors = parallel_map<GeometryFactors>(
      spec.n_runs, [&](std::size_t run) { return sample_geometry(spec.config, spec.config.seed, run); });
  double exact_sum = 0.0;
  double approx_sum = 0.0;
  for (const auto& f : factors) {
    exact_sum += f.exact;
    approx_sum += f.approx;
  }
  const double n = static_cast<double>(factors.size());

  for (double axis : spec.sweep.values()) {
    const double sinr_linear = spec.sweep.scale == AxisScale::db ? from_db(axis) : axis;
    const double srss = sigma_rss_sq(sigma_p_sq(spec.params.alpha, sinr_linear), spec.params.alpha);
    double ula = kNaN;
    try {
      ula = crlb_ula_baseline(spec.ula, spec.config.target, srss);
    } catch (const UnlocalizableError& e) {
      table.flagged.push_back({table.rows.size(), e.what()});
    }
    table.rows.push_back({axis, srss * exact_sum / n, srss * approx_sum / n, ula});
  }
  return table;
}

ResultTable run_crlb_cdf(const ExperimentSpec& spec) {
  ResultTable table;
  table.columns = {"s_m2", "analytic_cdf", "empirical_cdf"};
  const int K = spec.config.num_waveguides;
  const int M = spec.config.pas_per_waveguide;
  const double alpha = spec.params.alpha;

  double noise_var = kNaN;
  std::string failure;
  try {
    noise_var = sigma_p_sq(alpha, expected_sinr(K, spec.config, spec.params));
  } catch (const ConvergenceError& e) {
    failure = e.what();
  }

  // d_* is the activated PA on the nearest waveguide; only one waveguide is needed.
  auto d_star = parallel_map<double>(spec.n_runs, [&](std::size_t run) {
    Rng rng = replication_stream(spec.config.seed, run);
    while (true) {
      const Deployment dep = sample_deployment(spec.config, rng);
      if (dep.size() >= 1) return dep.activated_distance(0);
    }
  });
  std::vector<double> crlb(d_star.size());
  const double srss = std::isnan(noise_var) ? kNaN : sigma_rss_sq(noise_var, alpha);
  for (std::size_t i = 0; i < d_star.size(); ++i) {
    crlb[i] = std::isnan(srss) ? kNaN : crlb_approx(M, std::max(K, 2), srss, d_star[i]);
  }
  std::sort(crlb.begin(), crlb.end());

  for (double s : spec.sweep.values()) {
    double analytic = kNaN;
    double empirical = kNaN;
    if (failure.empty()) {
      analytic = crlb_cdf(s, M, K, noise_var, alpha, spec.config.line_density, spec.config.pa_density);
      empirical = empirical_cdf(crlb, s);
    } else {
      table.flagged.push_back({table.rows.size(), failure});
    }
    table.rows.push_back({s, analytic, empirical});
  }
  return table;
}

json config_to_json(const NetworkConfig& c) {
  return {{"line_density", c.line_density},
          {"pa_density", c.pa_density},
          {"disk_radius", c.disk_radius},
          {"num_waveguides", c.num_waveguides},
          {"pas_per_waveguide", c.pas_per_waveguide},
          {"seed", c.seed},
          {"target", {c.target.x, c.target.y}}};
}

json params_to_json(const ChannelParams& p) {
  return {{"carrier_hz", p.carrier_hz},
          {"alpha", p.alpha},
          {"tx_power", p.tx_power},
          {"noise_power", p.noise_power},
          {"effective_index", p.wavelength / p.guide_wavelength},
          {"wavelength", p.wavelength},
          {"guide_wavelength", p.guide_wavelength},
          {"eta", p.eta},
          {"normalized_noise", p.normalized_noise()}};
}

json sweep_to_json(const Sweep& s) {
  return {{"variable", s.variable},
          {"min", s.min},
          {"max", s.max},
          {"points", s.points},
          {"scale", to_string(s.scale)}};
}

json ula_to_json(const UlaConfig& u) {
  return {{"n_elements", u.n_elements},
          {"element_spacing", u.element_spacing},
          {"center", {u.center.x, u.center.y}},
          {"axis_angle", u.axis_angle}};
}

}  // namespace

std::string to_string(Figure figure) {
  switch (figure) {
    case Figure::localizability: return "localizability";
    case Figure::mse_vs_k: return "mse_vs_k";
    case Figure::crlb_vs_sinr: return "crlb_vs_sinr";
    case Figure::crlb_cdf: return "crlb_cdf";
  }
  return "unknown";
}

Figure figure_from_string(const std::string& name) {
  for (Figure f : {Figure::localizability, Figure::mse_vs_k, Figure::crlb_vs_sinr, Figure::crlb_cdf}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown figure: " + name);
}

std::string to_string(AxisScale scale) {
  switch (scale) {
    case AxisScale::linear: return "linear";
    case AxisScale::log: return "log";
    case AxisScale::db: return "db";
  }
  return "unknown";
}

AxisScale axis_scale_from_string(const std::string& name) {
  for (AxisScale s : {AxisScale::linear, AxisScale::log, AxisScale::db}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown axis scale: " + name);
}

std::vector<double> Sweep::values() const {
  std::vector<double> v;
  if (points < 1) return v;
  v.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    if (scale == AxisScale::log) {
      v.push_back(std::exp(std::log(min) + f * (std::log(max) - std::log(min))));
    } else {
      v.push_back(min + f * (max - min));
    }
  }
  return v;
}

void ExperimentSpec::validate() const {
  std::ostringstream bad;
  if (n_runs < 1) bad << " n_runs";
  if (!std::isfinite(sweep.min) || !std::isfinite(sweep.max) || sweep.min > sweep.max) bad << " sweep.bounds";
  if (sweep.points < 1) bad << " sweep.points";
  if (sweep.scale == AxisScale::log && !(sweep.min > 0.0)) bad << " sweep.min(log)";
  switch (figure) {
    case Figure::localizability:
      if (k_values.empty() || std::any_of(k_values.begin(), k_values.end(), [](int k) { return k < 2; })) {
        bad << " k_values";
      }
      if (sweep.scale != AxisScale::db && !(sweep.min > 0.0)) bad << " sweep.min(tau)";
      break;
    case Figure::mse_vs_k:
      if (sweep.min < 3.0 || sweep.max > 12.0) bad << " sweep.bounds(K)";
      break;
    case Figure::crlb_vs_sinr:
      if (config.num_waveguides < 2) bad << " config.num_waveguides";
      if (sweep.scale != AxisScale::db && !(sweep.min > 0.0)) bad << " sweep.min(sinr)";
      break;
    case Figure::crlb_cdf:
      if (config.num_waveguides < 2) bad << " config.num_waveguides";
      if (!(sweep.min > 0.0)) bad << " sweep.min(s)";
      break;
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    bad << " [" << e.what() << "]";
  }
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    bad << " [" << e.what() << "]";
  }
  if (const auto fields = bad.str(); !fields.empty()) {
    throw std::invalid_argument("invalid ExperimentSpec fields:" + fields);
  }
}

ReferenceSetup default_paper_config() {
  ReferenceSetup d;
  d.config.line_density = 0.1 / std::numbers::pi;
  d.config.pa_density = 0.1;
  d.config.disk_radius = 30.0;
  d.config.num_waveguides = 5;
  d.config.pas_per_waveguide = 1;
  d.config.seed = 20250101;
  d.params = ChannelParams::at_carrier(28e9, 2.1, 1.0, 1e-12, 1.4);
  d.n_runs = 100000;
  return d;
}

ExperimentSpec default_spec(Figure figure) {
  const ReferenceSetup d = default_paper_config();
  ExperimentSpec spec;
  spec.figure = figure;
  spec.config = d.config;
  spec.params = d.params;
  spec.n_runs = d.n_runs;
  spec.ula.center = {0.5 * d.config.disk_radius, 0.0};
  spec.ula.element_spacing = 0.5 * d.params.wavelength;
  switch (figure) {
    case Figure::localizability:
      spec.sweep = {"tau", -30.0, 10.0, 20, AxisScale::db};
      spec.k_values = {3, 5, 8};
      break;
    case Figure::mse_vs_k:
      spec.sweep = {"K", 3.0, 8.0, 6, AxisScale::linear};
      spec.n_runs = 10000;
      break;
    case Figure::crlb_vs_sinr:
      spec.sweep = {"sinr", -10.0, 30.0, 21, AxisScale::db};
      break;
    case Figure::crlb_cdf:
      spec.sweep = {"s", 0.01, 1.0e4, 43, AxisScale::log};
      break;
  }
  spec.output_path = to_string(figure) + ".csv";
  return spec;
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  ResultTable table;
  switch (spec.figure) {
    case Figure::localizability: table = run_localizability(spec); break;
    case Figure::mse_vs_k: table = run_mse(spec); break;
    case Figure::crlb_vs_sinr: table = run_crlb_vs_sinr(spec); break;
    case Figure::crlb_cdf: table = run_crlb_cdf(spec); break;
  }
  table.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

void write_csv(const ResultTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::string sidecar_json(const ExperimentSpec& spec, const ResultTable& table) {
  json flagged = json::array();
  for (const auto& f : table.flagged) flagged.push_back({{"row", f.row}, {"reason", f.reason}});
  json doc = {{"schema_version", kSidecarSchemaVersion},
              {"figure", to_string(spec.figure)},
              {"seed", spec.config.seed},
              {"n_runs", spec.n_runs},
              {"config", config_to_json(spec.config)},
              {"params", params_to_json(spec.params)},
              {"sweep", sweep_to_json(spec.sweep)},
              {"k_values", spec.k_values},
              {"ula", ula_to_json(spec.ula)},
              {"columns", table.columns},
              {"rows", table.rows.size()},
              {"flagged_rows", flagged}};
  return doc.dump(2) + "\n";
}

void write_outputs(const ExperimentSpec& spec, const ResultTable& table) {
  if (spec.output_path.empty()) throw std::invalid_argument("write_outputs: output_path is empty");
  std::ofstream csv(spec.output_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open " + spec.output_path);
  write_csv(table, csv);
  std::ofstream side(spec.output_path + ".json", std::ios::binary);
  if (!side) throw std::runtime_error("cannot open " + spec.output_path + ".json");
  side << sidecar_json(spec, table);
}

void apply_config_json(ExperimentSpec& spec, const std::string& json_text) {
  const json doc = json::parse(json_text);
  if (doc.contains("config")) {
    const json& c = doc["config"];
    NetworkConfig& cfg = spec.config;
    cfg.line_density = c.value("line_density", cfg.line_density);
    cfg.pa_density = c.value("pa_density", cfg.pa_density);
    cfg.disk_radius = c.value("disk_radius", cfg.disk_radius);
    cfg.num_waveguides = c.value("num_waveguides", cfg.num_waveguides);
    cfg.pas_per_waveguide = c.value("pas_per_waveguide", cfg.pas_per_waveguide);
    cfg.seed = c.value("seed", cfg.seed);
    if (c.contains("target")) cfg.target = {c["target"].at(0).get<double>(), c["target"].at(1).get<double>()};
  }
  if (doc.contains("params")) {
    const json& p = doc["params"];
    const ChannelParams& cur = spec.params;
    spec.params = ChannelParams::at_carrier(p.value("carrier_hz", cur.carrier_hz), p.value("alpha", cur.alpha),
                                            p.value("tx_power", cur.tx_power), p.value("noise_power", cur.noise_power),
                                            p.value("effective_index", cur.wavelength / cur.guide_wavelength));
  }
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    spec.sweep.variable = s.value("variable", spec.sweep.variable);
    spec.sweep.min = s.value("min", spec.sweep.min);
    spec.sweep.max = s.value("max", spec.sweep.max);
    spec.sweep.points = s.value("points", spec.sweep.points);
    if (s.contains("scale")) spec.sweep.scale = axis_scale_from_string(s["scale"].get<std::string>());
  }
  if (doc.contains("k_values")) spec.k_values = doc["k_values"].get<std::vector<int>>();
  if (doc.contains("n_runs")) spec.n_runs = doc["n_runs"].get<std::size_t>();
  if (doc.contains("ula")) {
    const json& u = doc["ula"];
    spec.ula.n_elements = u.value("n_elements", spec.ula.n_elements);
    spec.ula.element_spacing = u.value("element_spacing", spec.ula.element_spacing);
    spec.ula.axis_angle = u.value("axis_angle", spec.ula.axis_angle);
    if (u.contains("center")) spec.ula.center = {u["center"].at(0).get<double>(), u["center"].at(1).get<double>()};
  }
}

}  // namespace pinchloc
