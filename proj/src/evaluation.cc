#include "scenfuzz/evaluation.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "scenfuzz/error.h"

namespace scenfuzz {

DiversityGrid::DiversityGrid(std::vector<double> min, std::vector<double> max,
                             int intervals)
    : min_(std::move(min)), max_(std::move(max)), intervals_(intervals) {
  if (intervals_ < 1) throw InvalidArgument("diversity grid needs N >= 1");
  if (min_.size() != max_.size()) {
    throw InvalidArgument("diversity grid bounds length mismatch");
  }
  for (size_t i = 0; i < min_.size(); ++i) {
    if (!(min_[i] <= max_[i])) {
      throw InvalidArgument("diversity grid dim " + std::to_string(i) +
                            ": min above max");
    }
  }
}

DiversityGrid DiversityGrid::FromTrajectories(
    std::span<const Trajectory> trajectories, int intervals) {
  const EnvState* first = nullptr;
  for (const Trajectory& t : trajectories) {
    if (!t.empty()) {
      first = &t.front();
      break;
    }
  }
  if (first == nullptr) throw InvalidArgument("diversity: no states given");
  std::vector<double> lo = first->observation;
  std::vector<double> hi = first->observation;
  for (const Trajectory& t : trajectories) {
    for (const EnvState& s : t) {
      if (s.observation.size() != lo.size()) {
        throw InvalidArgument("diversity: observation length mismatch");
      }
      for (size_t i = 0; i < lo.size(); ++i) {
        lo[i] = std::min(lo[i], s.observation[i]);
        hi[i] = std::max(hi[i], s.observation[i]);
      }
    }
  }
  return DiversityGrid(std::move(lo), std::move(hi), intervals);
}

CellIndex CellIndexOf(std::span<const double> state,
                      const DiversityGrid& grid) {
  if (state.size() != grid.dims()) {
    throw InvalidArgument("cell_index: state length " +
                          std::to_string(state.size()) + " != " +
                          std::to_string(grid.dims()));
  }
  const int n = grid.intervals();
  CellIndex index(state.size(), 0);
  for (size_t i = 0; i < state.size(); ++i) {
    const double span = grid.max()[i] - grid.min()[i];
    if (span <= 0.0) continue;
    const double width = span / n;
    const double cell = std::floor((state[i] - grid.min()[i]) / width);
    index[i] = static_cast<int>(std::clamp(cell, 0.0, static_cast<double>(n - 1)));
  }
  return index;
}

DiversityCounts ComputeDiversityCounts(std::span<const Trajectory> trajectories,
                                       int intervals) {
  if (trajectories.empty()) {
    throw InvalidArgument("diversity_counts: empty trajectory list");
  }
  const DiversityGrid grid =
      DiversityGrid::FromTrajectories(trajectories, intervals);
  std::set<CellIndex> initial;
  std::set<CellIndex> terminal;
  std::set<CellIndex> entire;
  for (const Trajectory& t : trajectories) {
    if (t.empty()) continue;
    initial.insert(CellIndexOf(t.front().observation, grid));
    terminal.insert(CellIndexOf(t.back().observation, grid));
    for (const EnvState& s : t) entire.insert(CellIndexOf(s.observation, grid));
  }
  return {static_cast<int64_t>(initial.size()),
          static_cast<int64_t>(terminal.size()),
          static_cast<int64_t>(entire.size())};
}

void MetricsTracker::Record(bool failed, Origin origin, double alpha) {
  ++tests_run_;
  if (failed) ++failures_found_;
  log_.push_back({tests_run_, failed, origin, alpha});
}

double MetricsTracker::FailureRate() const {
  if (tests_run_ == 0) throw InvalidArgument("failure_rate: no tests run");
  return static_cast<double>(failures_found_) / static_cast<double>(tests_run_);
}

double MetricsTracker::WindowedFailureRate(int64_t window) const {
  if (tests_run_ == 0) throw InvalidArgument("failure_rate: no tests run");
  if (window <= 0) return FailureRate();
  const int64_t n = std::min<int64_t>(window, tests_run_);
  int64_t failures = 0;
  for (auto it = log_.end() - n; it != log_.end(); ++it) failures += it->failed;
  return static_cast<double>(failures) / static_cast<double>(n);
}

}  // namespace scenfuzz
