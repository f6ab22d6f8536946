#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krflow/base_geometry.hpp"
#include "krflow/flow_solver.hpp"
#include "krflow/io.hpp"
#include "krflow/model_metrics.hpp"

namespace krf {

enum class Preset {
  FlatCone,
  CylinderSplit,
  BulgingPreserve,
  BulgingBlowdown,
  ConicalPreserve,
  ConicalSoliton,
  FikSelfSimilar,
  DecayAppendix,
  BilipschitzPlateau,
};

const char* to_string(Preset p);
Preset preset_from_string(const std::string& name);

struct PresetInfo {
  Preset preset;
  std::string name;
  std::string description;
  std::string claims;
};

// fixed order, one row per preset
const std::vector<PresetInfo>& list_presets();

struct GridConfig {
  double rho_min = 0.0;
  double rho_max = 6.0;
  int points = 257;
};

struct FlowConfig {
  double horizon = 1.0;
  double dt = 0.0;
  TimeScheme scheme = TimeScheme::ImplicitTrapezoid;
  BoundaryKind bc_kind = BoundaryKind::DriftingModel;
  std::vector<double> output_times;
};

struct RegimeConfig {
  RegimeKind kind = RegimeKind::Conical;
  std::optional<double> c, N, k_log, p, t0, offset;
  std::string b_table;  // s,B csv for the FIK regime; empty solves the soliton instead
};

struct AnalysisConfig {
  int order = 3;
  std::vector<double> fit_window;       // rho interval of outer-expansion and regime fits
  std::vector<double> residual_window;  // rho interval of the truncated soliton residual
  std::vector<double> scales;           // r^2 (bulging) or s (conical)
  std::vector<double> rescaled_times;
  std::vector<double> rescaled_window;  // rho_hat interval
  std::vector<std::string> quantities;
  std::vector<double> sample_times;
  std::vector<double> horizons;
  std::vector<double> ball;
  std::optional<double> expected_exponent;
  std::map<std::string, double> tolerances;
};

struct ExperimentConfig {
  std::optional<Preset> preset;
  BaseGeometry base;
  RegimeConfig regime;
  GridConfig grid;
  FlowConfig flow;
  AnalysisConfig analysis;
  std::string output_dir = "krflow_out";

  std::vector<double> rho_grid() const;
  RegimeSpec regime_spec() const;  // loads b_table when set
};

ExperimentConfig preset_config(Preset p);

// canonical JSON text; config_from_json(config_to_json(c)) reproduces c exactly
std::string config_to_json(const ExperimentConfig& c);
// ConfigInvalid with the offending field path
ExperimentConfig config_from_json(const std::string& text);

struct ConfigLayers {
  std::optional<std::string> preset;     // from --preset
  std::optional<std::string> file_text;  // contents of --config
  // --key value pairs; dotted paths or the short aliases listed by flag_aliases()
  std::vector<std::pair<std::string, std::string>> flags;
};

// preset < file < flags. A preset named by a flag wins over one named in the file.
ExperimentConfig resolve_config(const ConfigLayers& layers);

const std::map<std::string, std::string>& flag_aliases();

struct Verdict {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string claim;  // serialized as paper_ref
};

struct RunReport {
  std::string scenario;
  std::vector<Verdict> verdicts;
  std::vector<io::NamedText> artifacts;  // paths relative to the output directory
  bool all_pass() const;
};

enum class Task { Run, Soliton, Flow, Blowdown, Decay };

const char* to_string(Task t);

// Pure computation; nothing touches the disk.
RunReport run_experiment(const ExperimentConfig& config, Task task = Task::Run);

std::string summary_json(const RunReport& report);

// config.resolved.json, every artifact and summary.json under config.output_dir, each written
// atomically; on failure every file written so far is removed again. The metadata text goes to
// run_metadata.json and is the only place a timestamp may appear.
void write_report(const ExperimentConfig& config, const RunReport& report, const std::string& metadata_json);

}  // namespace krf
