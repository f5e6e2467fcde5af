// pinchloc: emits figure data (CSV + JSON sidecar) for the localization study.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pinchloc/experiments.hpp"
#include "pinchloc/random.hpp"

namespace {

using namespace pinchloc;

constexpr std::size_t kQuickRuns = 1000;

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t runs = 0;
  std::string out;
  bool quick = false;
  bool linear = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON file overriding config/params/sweep fields")->check(CLI::ExistingFile);
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t s) { o.seed = s, o.seed_set = true; }, "Master RNG seed");
  cmd->add_option("--runs", o.runs, "Monte Carlo replications")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output CSV path; the sidecar is written to <out>.json");
  cmd->add_flag("--quick", o.quick, "Use 1000 replications (smoke test)");
  cmd->add_flag("--linear", o.linear, "Linear x-axis instead of dB (tau and SINR sweeps)");
}

ExperimentSpec resolve(Figure figure, const CommonOptions& o) {
  ExperimentSpec spec = default_spec(figure);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    std::stringstream text;
    text << in.rdbuf();
    apply_config_json(spec, text.str());
  }
  if (o.seed_set) spec.config.seed = o.seed;
  if (o.runs > 0) spec.n_runs = o.runs;
  if (o.quick) spec.n_runs = kQuickRuns;
  if (!o.out.empty()) spec.output_path = o.out;
  if (o.linear && spec.sweep.scale == AxisScale::db) {
    spec.sweep.min = std::pow(10.0, spec.sweep.min / 10.0);
    spec.sweep.max = std::pow(10.0, spec.sweep.max / 10.0);
    spec.sweep.scale = AxisScale::linear;
  }
  return spec;
}

int run_figure(Figure figure, const CommonOptions& o) {
  const ExperimentSpec spec = resolve(figure, o);
  const ResultTable table = run_experiment(spec);
  write_outputs(spec, table);
  std::cout << to_string(figure) << ": " << table.rows.size() << " rows, " << table.flagged.size()
            << " flagged, " << table.wall_seconds << " s -> " << spec.output_path << '\n';
  return 0;
}

int run_select(const CommonOptions& o, int K, int M) {
  ExperimentSpec spec = resolve(Figure::crlb_cdf, o);
  spec.config.num_waveguides = K;
  spec.config.pas_per_waveguide = M;
  std::vector<Deployment> deployments;
  deployments.reserve(spec.n_runs);
  for (std::size_t i = 0; i < spec.n_runs; ++i) {
    Rng rng = replication_stream(spec.config.seed, i);
    deployments.push_back(sample_deployment(spec.config, rng));
  }
  const DStarSelection sel = select_d_star(deployments, M, K);
  std::cout << "samples_used " << sel.samples_used << '\n';
  for (const auto& c : sel.candidates) {
    std::cout << "k=" << c.k << " m=" << c.m << " mi=" << c.mutual_information << '\n';
  }
  std::cout << "chosen k=" << sel.chosen.k << " m=" << sel.chosen.m << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pinching-antenna RSS localization experiments"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    Figure figure;
    const char* help;
  };
  const Entry entries[] = {
      {"localizability", Figure::localizability, "Localizability probability versus threshold"},
      {"mse-vs-k", Figure::mse_vs_k, "MLE mean squared error versus number of waveguides"},
      {"crlb-vs-sinr", Figure::crlb_vs_sinr, "Exact, approximate and ULA CRLB versus SINR"},
      {"crlb-cdf", Figure::crlb_cdf, "Distribution of the approximate CRLB"},
  };
  CommonOptions options[std::size(entries)];
  CLI::App* commands[std::size(entries)];
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    commands[i] = app.add_subcommand(entries[i].name, entries[i].help);
    add_common(commands[i], options[i]);
  }

  CommonOptions select_options;
  int select_k = 5;
  int select_m = 2;
  auto* select = app.add_subcommand("select-d-star", "Pick the anchor most informative about det(FIM)");
  add_common(select, select_options);
  select->add_option("-K", select_k, "Waveguides")->check(CLI::Range(2, 64));
  select->add_option("-M", select_m, "PAs per waveguide")->check(CLI::Range(1, 64));

  std::string defaults_figure = "localizability";
  auto* defaults = app.add_subcommand("defaults", "Print the resolved default spec as JSON");
  defaults->add_option("figure", defaults_figure, "Figure name")
      ->check(CLI::IsMember({"localizability", "mse_vs_k", "crlb_vs_sinr", "crlb_cdf"}));

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < std::size(entries); ++i) {
      if (commands[i]->parsed()) return run_figure(entries[i].figure, options[i]);
    }
    if (select->parsed()) return run_select(select_options, select_k, select_m);
    if (defaults->parsed()) {
      std::cout << sidecar_json(default_spec(figure_from_string(defaults_figure)), {});
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
