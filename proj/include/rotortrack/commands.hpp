#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace rotortrack {

/// Exit status for an error escaping a command: the ErrorCode value for typed
/// errors, 1 otherwise.
int exit_code_for(const std::exception& error);

struct CommandStreams {
  std::ostream& out;
  std::ostream& err;
};

/// Each command returns its process exit status and never throws.
int cmd_simulate(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
                 CommandStreams io);
int cmd_replay(const std::filesystem::path& config_path, const std::filesystem::path& fields_path,
               std::optional<double> cutoff, const std::optional<std::filesystem::path>& out_dir, CommandStreams io);
int cmd_study(const std::filesystem::path& config_path, const std::vector<double>& dt_list,
              const std::vector<int>& m_list, const std::optional<std::filesystem::path>& out_dir,
              CommandStreams io);
int cmd_tracks_preview(const std::filesystem::path& config_path,
                       const std::optional<std::filesystem::path>& out_dir, CommandStreams io);

}  // namespace rotortrack
