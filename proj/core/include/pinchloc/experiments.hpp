#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pinchloc/channel.hpp"
#include "pinchloc/crlb.hpp"
#include "pinchloc/geometry.hpp"

namespace pinchloc {

inline constexpr int kSidecarSchemaVersion = 1;

enum class Figure { localizability, mse_vs_k, crlb_vs_sinr, crlb_cdf };

enum class AxisScale { linear, log, db };

std::string to_string(Figure figure);
Figure figure_from_string(const std::string& name);
std::string to_string(AxisScale scale);
AxisScale axis_scale_from_string(const std::string& name);

/// Sweep axis. `db` sweeps are evenly spaced in dB and reported in dB.
struct Sweep {
  std::string variable;
  double min = 0.0;
  double max = 0.0;
  int points = 1;
  AxisScale scale = AxisScale::linear;

  /// Axis values as reported in the table (dB for db sweeps).
  std::vector<double> values() const;
};

struct ExperimentSpec {
  Figure figure = Figure::localizability;
  NetworkConfig config{};
  ChannelParams params{};
  Sweep sweep{};
  std::vector<int> k_values;  ///< localizability curves
  std::size_t n_runs = 100000;
  std::string output_path;
  UlaConfig ula{};  ///< crlb_vs_sinr baseline

  /// Throws std::invalid_argument naming every offending field.
  void validate() const;
};

struct ReferenceSetup {
  NetworkConfig config;
  ChannelParams params;
  std::size_t n_runs = 100000;
};

/// Deployment and channel parameters of the reference simulation setup.
ReferenceSetup default_paper_config();

/// Spec for `figure` with the reference configuration and its default sweep.
ExperimentSpec default_spec(Figure figure);

struct FlaggedRow {
  std::size_t row = 0;
  std::string reason;
};

struct ResultTable {
  std::vector<std::string> columns;  ///< names carry units
  std::vector<std::vector<double>> rows;
  std::vector<FlaggedRow> flagged;
  double wall_seconds = 0.0;  ///< not written to the output files
};

ResultTable run_experiment(const ExperimentSpec& spec);

void write_csv(const ResultTable& table, std::ostream& out);

/// Versioned JSON capturing the resolved spec, seed and flagged rows.
std::string sidecar_json(const ExperimentSpec& spec, const ResultTable& table);

/// Writes `spec.output_path` (CSV) and `spec.output_path + ".json"`.
void write_outputs(const ExperimentSpec& spec, const ResultTable& table);

/// Applies a JSON config document (same field names as the sidecar's
/// "config"/"params"/"sweep" blocks) on top of `spec`.
void apply_config_json(ExperimentSpec& spec, const std::string& json_text);

}  // namespace pinchloc
