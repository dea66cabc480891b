#include "rotortrack/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rotortrack/config.hpp"
#include "rotortrack/errors.hpp"
#include "rotortrack/output.hpp"
#include "rotortrack/study.hpp"

namespace rotortrack {

int exit_code_for(const std::exception& error) {
  if (const auto* e = dynamic_cast<const Error*>(&error)) return static_cast<int>(e->code());
  return 1;
}

namespace {

template <typename Fn>
int guarded(CommandStreams io, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

std::filesystem::path output_dir(const RunConfig& config, const std::optional<std::filesystem::path>& override_dir) {
  return override_dir ? *override_dir : std::filesystem::path(config.output.directory);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write " + path.string());
  out << text;
}

void write_run_artifacts(const std::filesystem::path& dir, const RunConfig& config, const SimulationRecord& record) {
  write_record_csv(dir / "record.csv", record, config.units());
  write_fields_csv(dir / "fields.csv", record.fields);
  if (config.output.svg && record.samples.size() > 1) {
    write_traces_svg(dir / "traces.svg", record);
    write_plane_svg(dir / "plane.svg", record);
    write_populations_svg(dir / "populations.svg", record);
  }
  if (config.output.frames) write_frames(dir / "frames", record, config.output.frame_count);
}

template <typename E>
int save_partial(const E& error, const std::filesystem::path& dir, const RunConfig& config, CommandStreams io) {
  io.err << "error: " << error.what() << '\n';
  if (const auto& partial = error.partial_record()) {
    write_run_artifacts(dir, config, *partial);
    io.err << "partial record up to the failure written to " << dir.string() << '\n';
  }
  return static_cast<int>(error.code());
}

}  // namespace

int cmd_simulate(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
                 CommandStreams io) {
  return guarded(io, [&] {
    RunConfig config = parse_config(config_path);
    const std::filesystem::path dir = output_dir(config, out_dir);
    config.output.directory = dir.string();
    std::filesystem::create_directories(dir);
    write_text(dir / "resolved_config.json", resolved_config_json(config));
    const UnitReport units = convert_units(config);
    write_text(dir / "units.txt", units.text());
    io.out << units.text();

    const Track track = build_track(config);
    const RotorState state0 = RotorState::basis_state(config.basis(), config.simulation.initial_m);
    SimulationRecord record;
    try {
      record = run_tracking(state0, track, config.guard, config.simulation.params);
    } catch (const SingularityGuard& e) {
      return save_partial(e, dir, config, io);
    } catch (const BasisLeakage& e) {
      return save_partial(e, dir, config, io);
    }
    for (const std::string& w : record.warnings) io.err << "warning: " << w << '\n';
    write_run_artifacts(dir, config, record);

    const auto peak = std::max_element(record.fields.begin(), record.fields.end(), [](const auto& a, const auto& b) {
      return std::abs(a.eps_x) < std::abs(b.eps_x);
    });
    double field_max = 0.0;
    for (const FieldSample& f : record.fields) field_max = std::max(field_max, std::hypot(f.eps_x, f.eps_y));
    io.out << std::setprecision(6) << "steps              = " << record.fields.size() - 1 << '\n'
           << "max |<cos> - x_d|  = " << record.max_deviation_x << '\n'
           << "max |<sin> - y_d|  = " << record.max_deviation_y << '\n'
           << "rms deviation      = " << record.rms_deviation << '\n'
           << "peak |eps_x| at t  = " << peak->t << " hbar/B\n"
           << "max |eps|          = " << field_max << " B/mu = "
           << config.units().to_v_per_m(field_max) << " V/m\n"
           << "artifacts in " << dir.string() << '\n';
    return 0;
  });
}

int cmd_replay(const std::filesystem::path& config_path, const std::filesystem::path& fields_path,
               std::optional<double> cutoff, const std::optional<std::filesystem::path>& out_dir, CommandStreams io) {
  return guarded(io, [&] {
    RunConfig config = parse_config(config_path);
    const std::filesystem::path dir = out_dir ? *out_dir : std::filesystem::path(config.output.directory) / "replay";
    config.output.directory = dir.string();
    if (!cutoff && config.track.field_cutoff > 0.0) cutoff = config.track.field_cutoff;
    if (cutoff && !(*cutoff > 0.0)) throw ConfigError("--cutoff", "must be positive");

    std::vector<FieldSample> series = read_fields_csv(fields_path);
    if (cutoff) series = filter_fields(series, *cutoff);

    const Track track = build_track(config);
    const RotorState state0 = RotorState::basis_state(config.basis(), config.simulation.initial_m);
    SimulationRecord record;
    try {
      record = run_replay(state0, series, config.simulation.params, FieldInterpolation::kHold, &track);
    } catch (const BasisLeakage& e) {
      return save_partial(e, dir, config, io);
    }
    std::filesystem::create_directories(dir);
    write_text(dir / "resolved_config.json", resolved_config_json(config));
    write_run_artifacts(dir, config, record);

    nlohmann::ordered_json report;
    report["fields"] = std::filesystem::absolute(fields_path).string();
    report["cutoff"] = cutoff ? nlohmann::ordered_json(*cutoff) : nlohmann::ordered_json(nullptr);
    report["max_deviation_x"] = record.max_deviation_x;
    report["max_deviation_y"] = record.max_deviation_y;
    report["max_deviation"] = record.max_deviation();
    report["rms_deviation"] = record.rms_deviation;
    write_text(dir / "replay_report.json", report.dump(2) + "\n");

    io.out << std::setprecision(6) << "replayed " << series.size() << " field samples"
           << (cutoff ? " (low-passed at " + format_double(*cutoff) + ")" : std::string()) << '\n'
           << "max |<cos> - x_d|  = " << record.max_deviation_x << '\n'
           << "max |<sin> - y_d|  = " << record.max_deviation_y << '\n'
           << "rms deviation      = " << record.rms_deviation << '\n'
           << "artifacts in " << dir.string() << '\n';
    return 0;
  });
}

int cmd_study(const std::filesystem::path& config_path, const std::vector<double>& dt_list,
              const std::vector<int>& m_list, const std::optional<std::filesystem::path>& out_dir,
              CommandStreams io) {
  return guarded(io, [&] {
    const RunConfig config = parse_config(config_path);
    if (dt_list.empty()) throw ConfigError("--dt", "dt list is empty");
    if (m_list.empty()) throw ConfigError("--m", "M list is empty");
    for (double dt : dt_list) {
      if (!(dt > 0.0) || dt > config.simulation.duration) throw ConfigError("--dt", "entries must be in (0, T]");
    }
    for (int m : m_list) {
      if (m < 1) throw ConfigError("--m", "entries must be >= 1");
    }
    const std::filesystem::path dir = output_dir(config, out_dir);
    const Track track = build_track(config);
    const std::vector<StudyCell> cells =
        convergence_study(track, config.guard, config.simulation.params, dt_list, m_list);
    write_study_csv(dir / "study.csv", cells);

    io.out << std::left << std::setw(12) << "dt" << std::setw(6) << "M" << std::setw(18) << "status"
           << std::setw(14) << "max_dev" << std::setw(10) << "ratio" << "runtime_s\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const StudyCell& c = cells[i];
      std::string ratio;
      if (i >= m_list.size()) {
        const StudyCell& prev = cells[i - m_list.size()];
        if (prev.ok() && c.ok() && c.max_deviation > 0.0) ratio = format_double(prev.max_deviation / c.max_deviation);
      }
      std::ostringstream dev;
      dev << std::setprecision(4) << c.max_deviation;
      std::ostringstream rt;
      rt << std::fixed << std::setprecision(2) << c.runtime_s;
      io.out << std::setw(12) << format_double(c.dt) << std::setw(6) << c.cutoff << std::setw(18) << c.status
             << std::setw(14) << (c.ok() ? dev.str() : "-") << std::setw(10) << ratio.substr(0, 8) << rt.str()
             << '\n';
    }
    io.out << "study written to " << (dir / "study.csv").string() << '\n';
    return 0;
  });
}

int cmd_tracks_preview(const std::filesystem::path& config_path,
                       const std::optional<std::filesystem::path>& out_dir, CommandStreams io) {
  return guarded(io, [&] {
    const RunConfig config = parse_config(config_path);
    const std::filesystem::path dir = output_dir(config, out_dir);
    const Track track = build_track(config);
    const int n = config.output.preview_samples;
    write_track_preview_csv(dir / "track_preview.csv", track, n);
    if (config.output.svg) write_track_plane_svg(dir / "track_plane.svg", track, n);

    const double r_max = track.max_radius();
    const RotorState state0 = RotorState::basis_state(config.basis(), config.simulation.initial_m);
    const ConsistencyReport report = consistency_check(state0, track, config.simulation.params.consistency_tol);
    io.out << std::setprecision(6) << "track kind         = " << to_string(track.kind()) << '\n'
           << "T                  = " << track.duration() << " hbar/B\n"
           << "max radius         = " << r_max << (r_max < 1.0 ? " (inside the unit disk)" : " (NOT admissible)")
           << '\n'
           << "initial state      = " << (report.pass ? "consistent" : "inconsistent") << " (max residual "
           << report.max_residual() << ")\n"
           << "preview written to " << dir.string() << '\n';
    return r_max < 1.0 ? 0 : static_cast<int>(ErrorCode::kConfig);
  });
}

}  // namespace rotortrack
