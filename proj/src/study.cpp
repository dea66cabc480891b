#include "rotortrack/study.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "rotortrack/errors.hpp"

namespace rotortrack {

unsigned study_thread_count(std::size_t cells) {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ROTORTRACK_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, cells)));
}

namespace {

StudyCell run_cell(const Track& track, const GuardConfig& guard, SimParams params, double dt, int cutoff) {
  StudyCell cell;
  cell.dt = dt;
  cell.cutoff = cutoff;
  const auto start = std::chrono::steady_clock::now();
  try {
    params.dt = dt;
    const BasisSpec basis(cutoff);
    const SimulationRecord record = run_tracking(RotorState::basis_state(basis, 0), track, guard, params);
    cell.status = "ok";
    cell.max_deviation = record.max_deviation();
  } catch (const Error& e) {
    cell.status = to_string(e.code());
    cell.message = e.what();
  } catch (const std::exception& e) {
    cell.status = "Error";
    cell.message = e.what();
  }
  cell.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

}  // namespace

std::vector<StudyCell> convergence_study(const Track& track, const GuardConfig& guard, const SimParams& base,
                                         std::span<const double> dt_list, std::span<const int> m_list,
                                         unsigned threads) {
  if (dt_list.empty()) throw ConfigError("study.dt", "dt list is empty");
  if (m_list.empty()) throw ConfigError("study.M", "M list is empty");

  std::vector<StudyCell> cells(dt_list.size() * m_list.size());
  if (threads == 0) threads = study_thread_count(cells.size());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      cells[i] = run_cell(track, guard, base, dt_list[i / m_list.size()], m_list[i % m_list.size()]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace rotortrack
