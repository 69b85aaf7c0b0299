#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "scenfuzz/environment.h"
#include "scenfuzz/evaluation.h"
#include "scenfuzz/rng.h"
#include "scenfuzz/scenario.h"

namespace scenfuzz {

struct CorpusEntry {
  Scenario scenario;
  double r_seed = 0.0;
  double sensitivity = 0.0;
  // Always -r_seed.
  double potential = 0.0;
  // Grid cell of the rollout's terminal state.
  CellIndex freshness_cell;
  int64_t added_at = 0;
};

// Draws a raw perturbation (one value per dimension, in parameter units).
using PerturbationSource =
    std::function<std::vector<double>(const ScenarioSpace&, Rng&)>;

struct SensitivityOptions {
  // Half-width of the uniform perturbation as a fraction of each dimension's
  // range. Must be positive.
  double amplitude = 0.05;
  // Number of perturbations averaged.
  int draws = 1;
  // Redraws allowed per draw when the realized (post-clip) perturbation is
  // degenerate.
  int max_retries = 8;
  double min_norm = 1e-12;
  int max_frames = 100;
  // Defaults to U(-amplitude * range_i, amplitude * range_i) per dimension.
  PerturbationSource source;
};

// rho = |r_seed - r_delta| / ||delta||_2. Throws when ||delta|| is zero.
double SensitivityFromRewards(double r_seed, double r_delta,
                              std::span<const double> delta);

// Rolls out the scenario and a clipped random perturbation of it and returns
// the sensitivity of the cumulative reward. `r_seed` skips the first rollout
// when already known. Throws on amplitude <= 0 or when every draw degenerates.
double ComputeSensitivity(Environment& env, const Scenario& scenario,
                          const SensitivityOptions& options, Rng& rng,
                          std::optional<double> r_seed = std::nullopt);

struct SeedWeighting {
  // Weight floor = max(absolute_floor, relative_floor * max sensitivity).
  double relative_floor = 1e-3;
  double absolute_floor = 0.0;
};

enum class UpdateOutcome { kAddedNew, kSeedRemovedFailureRecorded, kDiscarded };

class Corpus {
 public:
  explicit Corpus(std::optional<size_t> capacity = std::nullopt)
      : capacity_(capacity) {}

  const std::vector<CorpusEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::optional<size_t> capacity() const { return capacity_; }

  // Adds an entry; on capacity overflow the lowest-potential entry goes.
  void Add(CorpusEntry entry);
  bool Remove(ScenarioId id);
  const CorpusEntry* Find(ScenarioId id) const;

  std::vector<double> Potentials() const;
  // True when no entry ever added to this corpus ended in `cell`.
  bool IsFreshCell(const CellIndex& cell) const;

  // Draws an entry with probability proportional to sensitivity + floor;
  // uniform when every weight is zero. Throws on an empty corpus.
  CorpusEntry SampleSeed(Rng& rng, const SeedWeighting& weighting = {}) const;
  // Normalized sampling probabilities, aligned with entries().
  std::vector<double> SamplingProbabilities(
      const SeedWeighting& weighting = {}) const;

  // Applies the test result of a scenario generated from `seed`:
  //  - failure: the seed is removed;
  //  - reward strictly below the seed's or terminal cell never seen: the new
  //    scenario is added (its sensitivity comes from `sensitivity`);
  //  - otherwise the scenario is discarded.
  UpdateOutcome UpdateAfterTest(const CorpusEntry& seed,
                                const Scenario& scenario,
                                const EpisodeResult& result,
                                const CellIndex& terminal_cell,
                                int64_t iteration,
                                const std::function<double()>& sensitivity);

 private:
  std::vector<double> Weights(const SeedWeighting& weighting) const;

  std::optional<size_t> capacity_;
  std::vector<CorpusEntry> entries_;
  std::set<CellIndex> seen_cells_;
};

struct CorpusInitOptions {
  int max_frames = 100;
  // Intervals per observation dimension for the freshness grid.
  int freshness_intervals = 10;
  SensitivityOptions sensitivity;
  // Total candidate draws allowed beyond `count` before giving up.
  int retry_budget = 10000;
  // Skip candidates whose rollout already fails, so failing scenarios never
  // become seeds.
  bool reject_failing = true;
};

// Uniform grid over the environment's documented observation bounds.
DiversityGrid FreshnessGrid(const Environment& env, int intervals);

// Samples `count` valid scenarios uniformly, rolls each out and fills in the
// reward, potential, sensitivity and freshness cell.
Corpus InitRandomCorpus(Environment& env, int count, Rng& rng, IdSource& ids,
                        const CorpusInitOptions& options,
                        std::optional<size_t> capacity = std::nullopt);

// Uniform draw inside the space that satisfies the constraint hook; throws
// after `retry_budget` rejected candidates.
std::vector<double> SampleValidParams(const ScenarioSpace& space,
                                      const ConstraintHook& hook, Rng& rng,
                                      int retry_budget);

}  // namespace scenfuzz
