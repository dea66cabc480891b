#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rotortrack/field_solver.hpp"
#include "rotortrack/propagation.hpp"
#include "rotortrack/track.hpp"
#include "rotortrack/units.hpp"

namespace rotortrack {

struct RotorConfig {
  double b_invcm = 0.203;
  double mu_debye = 0.709;
  int cutoff = 16;
};

struct SimulationConfig {
  /// Exactly one is given in the file; `duration` is always the reduced value.
  std::optional<double> t_reduced;
  std::optional<double> t_ps;
  double duration = 0.0;
  SimParams params;
  /// Initial basis state |m>.
  int initial_m = 0;
};

struct TrackConfig {
  /// gaussian, spiral or data.
  TrackKind kind = TrackKind::kGaussian;
  GaussianParams gaussian;
  SpiralParams spiral;
  /// Absolute path of the data CSV (resolved against the config file's directory).
  std::string data_file;
  DataTrackOptions data;
  /// Cosine blend-in window in reduced time; 0 disables it.
  double blend_in = 0.0;
  /// Default low-pass cutoff for replay (cycles per reduced time unit); 0 means none.
  double field_cutoff = 0.0;
};

struct OutputConfig {
  std::string directory = "out";
  bool svg = true;
  bool frames = false;
  int frame_count = 200;
  int preview_samples = 1001;
};

struct RunConfig {
  RotorConfig rotor;
  SimulationConfig simulation;
  TrackConfig track;
  GuardConfig guard;
  OutputConfig output;

  UnitSystem units() const { return UnitSystem(rotor.b_invcm, rotor.mu_debye); }
  BasisSpec basis() const { return BasisSpec(rotor.cutoff); }
};

/// Reads and validates a JSON run configuration. Unknown keys, missing sections
/// and invalid values raise ConfigError naming the offending key path.
RunConfig parse_config(const std::filesystem::path& path);
/// Same, from JSON text; relative data paths resolve against `base_dir`.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

/// The fully defaulted configuration as JSON text. Parsing it again yields the same RunConfig.
std::string resolved_config_json(const RunConfig& config);

struct UnitReport {
  double time_unit_ps = 0.0;
  double field_unit_v_per_m = 0.0;
  double duration = 0.0;
  double duration_ps = 0.0;
  double dt = 0.0;
  double dt_ps = 0.0;

  std::string text() const;
};

UnitReport convert_units(const RunConfig& config);

/// Builds the designated track on [0, T]; admissibility failures throw TrackError.
Track build_track(const RunConfig& config);

}  // namespace rotortrack
