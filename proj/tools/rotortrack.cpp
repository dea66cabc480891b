#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotortrack/commands.hpp"
#include "rotortrack/errors.hpp"

namespace rt = rotortrack;

int main(int argc, char** argv) {
  CLI::App app{"Singularity-free two-field orientation tracking for a planar rotor"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string fields;
  double cutoff = 0.0;
  std::vector<double> dts;
  std::vector<int> ms;

  auto* simulate = app.add_subcommand("simulate", "Run closed-loop tracking and write record/fields/plots");
  simulate->add_option("--config", config, "JSON run configuration")->required();
  simulate->add_option("--out", out, "Output directory (overrides output.directory)");

  auto* replay = app.add_subcommand("replay", "Replay a field file open-loop, optionally low-passed");
  replay->add_option("--config", config, "JSON run configuration")->required();
  replay->add_option("--fields", fields, "fields.csv from a previous run")->required();
  auto* cutoff_opt = replay->add_option("--cutoff", cutoff, "Low-pass cutoff, cycles per hbar/B");
  replay->add_option("--out", out, "Output directory (default <output.directory>/replay)");

  auto* study = app.add_subcommand("study", "Tracking deviation over a (dt, M) grid");
  study->add_option("--config", config, "JSON run configuration")->required();
  study->add_option("--dt", dts, "Comma-separated time steps")->required()->delimiter(',');
  study->add_option("--m", ms, "Comma-separated basis cutoffs")->required()->delimiter(',');
  study->add_option("--out", out, "Output directory (overrides output.directory)");

  auto* tracks = app.add_subcommand("tracks", "Track utilities");
  tracks->require_subcommand(1);
  auto* preview = tracks->add_subcommand("preview", "Sample the designated track and check admissibility");
  preview->add_option("--config", config, "JSON run configuration")->required();
  preview->add_option("--out", out, "Output directory (overrides output.directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(rt::ErrorCode::kConfig);
  }

  const rt::CommandStreams io{std::cout, std::cerr};
  const auto out_dir = out.empty() ? std::nullopt : std::optional<std::filesystem::path>(out);
  if (*simulate) return rt::cmd_simulate(config, out_dir, io);
  if (*replay) {
    return rt::cmd_replay(config, fields, cutoff_opt->count() ? std::optional<double>(cutoff) : std::nullopt,
                          out_dir, io);
  }
  if (*study) return rt::cmd_study(config, dts, ms, out_dir, io);
  if (*preview) return rt::cmd_tracks_preview(config, out_dir, io);
  return 1;
}
