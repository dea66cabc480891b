#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "rotortrack/propagation.hpp"
#include "rotortrack/study.hpp"
#include "rotortrack/units.hpp"

namespace rotortrack {

/// Shortest decimal that round-trips the double.
std::string format_double(double x);

/// t, t_ps, eps_x, eps_y, ox, oy, ox_d, oy_d, D, margin, norm, pop_m-M ... pop_mM.
void write_record_csv(const std::filesystem::path& path, const SimulationRecord& record, const UnitSystem& units);
/// t, eps_x, eps_y, one row per entry.
void write_fields_csv(const std::filesystem::path& path, std::span<const FieldSample> fields);
/// Reads a file written by write_fields_csv. Throws DataFormatError on missing
/// columns or unparsable values.
std::vector<FieldSample> read_fields_csv(const std::filesystem::path& path);
/// dt, M, status, max_deviation, runtime_s, message.
void write_study_csv(const std::filesystem::path& path, std::span<const StudyCell> cells);
/// t, x_d, y_d, d2x_d, d2y_d, radius at `samples` uniform times.
void write_track_preview_csv(const std::filesystem::path& path, const Track& track, int samples);

/// Orientation and field traces against time.
void write_traces_svg(const std::filesystem::path& path, const SimulationRecord& record);
/// <sin> against <cos> inside the unit circle; the designated path is dashed.
void write_plane_svg(const std::filesystem::path& path, const SimulationRecord& record);
/// Designated path only (track preview).
void write_track_plane_svg(const std::filesystem::path& path, const Track& track, int samples);
/// log10 population of each |m> over time.
void write_populations_svg(const std::filesystem::path& path, const SimulationRecord& record);
/// frames/frame_NNNNN.csv, each with one row t, ox, oy, ox_d, oy_d.
void write_frames(const std::filesystem::path& dir, const SimulationRecord& record, int count);

}  // namespace rotortrack
