#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scenfuzz/environment.h"
#include "scenfuzz/scenario.h"

namespace scenfuzz {

// Potential of a rollout: the negated cumulative reward. Higher means closer
// to failure.
inline double PotentialOf(const EpisodeResult& result) {
  return -result.cumulative_reward;
}

using CellIndex = std::vector<int>;

// Equal-width binning of each state dimension into `intervals` cells between
// per-dimension bounds.
class DiversityGrid {
 public:
  DiversityGrid(std::vector<double> min, std::vector<double> max,
                int intervals);

  // Bounds taken from the observed min/max over every state of every
  // trajectory. Throws on empty input.
  static DiversityGrid FromTrajectories(std::span<const Trajectory> trajectories,
                                        int intervals);

  size_t dims() const { return min_.size(); }
  int intervals() const { return intervals_; }
  const std::vector<double>& min() const { return min_; }
  const std::vector<double>& max() const { return max_; }

 private:
  std::vector<double> min_;
  std::vector<double> max_;
  int intervals_;
};

// index[i] = clamp(floor((state[i] - min[i]) / ((max[i] - min[i]) / N)),
// 0, N - 1); a degenerate dimension (max == min) maps to 0.
CellIndex CellIndexOf(std::span<const double> state, const DiversityGrid& grid);

struct DiversityCounts {
  int64_t n_initial = 0;
  int64_t n_terminal = 0;
  int64_t n_entire = 0;

  bool operator==(const DiversityCounts&) const = default;
};

// Distinct grid cells covered by the initial states, the terminal states and
// all states of the given (failure) trajectories. The grid is fit to the
// observed state bounds of the input. Throws on empty input.
DiversityCounts ComputeDiversityCounts(std::span<const Trajectory> trajectories,
                                       int intervals);

struct IterationRecord {
  int64_t iteration = 0;
  bool failed = false;
  Origin origin = Origin::kInitialSample;
  double alpha = 0.0;
};

// Counts tests and failures and keeps the per-iteration log.
class MetricsTracker {
 public:
  void Record(bool failed, Origin origin, double alpha);

  int64_t tests_run() const { return tests_run_; }
  int64_t failures_found() const { return failures_found_; }
  const std::vector<IterationRecord>& log() const { return log_; }

  // failures / tests over the whole history. Throws when no test ran.
  double FailureRate() const;
  // failures / tests over the last `window` tests.
  double WindowedFailureRate(int64_t window) const;

 private:
  int64_t tests_run_ = 0;
  int64_t failures_found_ = 0;
  std::vector<IterationRecord> log_;
};

}  // namespace scenfuzz
