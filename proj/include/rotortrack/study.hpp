#pragma once

#include <span>
#include <string>
#include <vector>

#include "rotortrack/propagation.hpp"

namespace rotortrack {

struct StudyCell {
  double dt = 0.0;
  int cutoff = 0;
  /// "ok" or the error category name of the failed run.
  std::string status;
  double max_deviation = 0.0;
  double runtime_s = 0.0;
  std::string message;

  bool ok() const { return status == "ok"; }
};

/// Threads to use for `cells` independent runs: hardware concurrency capped by
/// ROTORTRACK_THREADS when set, and never more than `cells`.
unsigned study_thread_count(std::size_t cells);

/// Runs the tracking problem from the ground state for every (dt, M) pair, in
/// parallel. Cells are ordered dt-major, M-minor. Engine errors are recorded in
/// the cell; InvalidArgument is thrown for empty lists. threads = 0 picks
/// study_thread_count().
std::vector<StudyCell> convergence_study(const Track& track, const GuardConfig& guard, const SimParams& base,
                                         std::span<const double> dt_list, std::span<const int> m_list,
                                         unsigned threads = 0);

}  // namespace rotortrack
