#include "scenfuzz/corpus.h"

#include <algorithm>
#include <cmath>

#include "scenfuzz/error.h"

namespace scenfuzz {
namespace {

std::vector<double> UniformPerturbation(const ScenarioSpace& space,
                                        double amplitude, Rng& rng) {
  std::vector<double> delta(space.dims());
  for (size_t i = 0; i < delta.size(); ++i) {
    const double half = amplitude * space.range(i);
    delta[i] = rng.Uniform(-half, half);
  }
  return delta;
}

double Norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

double SensitivityFromRewards(double r_seed, double r_delta,
                              std::span<const double> delta) {
  const double norm = Norm2(delta);
  if (!(norm > 0.0)) {
    throw InvalidArgument("sensitivity: zero perturbation norm");
  }
  return std::abs(r_seed - r_delta) / norm;
}

double ComputeSensitivity(Environment& env, const Scenario& scenario,
                          const SensitivityOptions& options, Rng& rng,
                          std::optional<double> r_seed) {
  if (!(options.amplitude > 0.0)) {
    throw InvalidArgument("sensitivity: amplitude must be positive");
  }
  if (options.draws < 1) throw InvalidArgument("sensitivity: draws must be >= 1");
  const ScenarioSpace& space = env.space();
  if (!r_seed) {
    r_seed = RunEpisode(env, scenario, options.max_frames).cumulative_reward;
  }
  const ConstraintHook hook = env.constraint_hook();

  double total = 0.0;
  for (int draw = 0; draw < options.draws; ++draw) {
    bool done = false;
    for (int attempt = 0; attempt <= options.max_retries && !done; ++attempt) {
      std::vector<double> raw =
          options.source ? options.source(space, rng)
                         : UniformPerturbation(space, options.amplitude, rng);
      std::vector<double> moved(scenario.params);
      for (size_t i = 0; i < moved.size(); ++i) moved[i] += raw.at(i);
      moved = Clip(space, moved);
      std::vector<double> realized(moved.size());
      for (size_t i = 0; i < moved.size(); ++i) {
        realized[i] = moved[i] - scenario.params[i];
      }
      if (Norm2(realized) < options.min_norm) continue;
      // A perturbation that breaks an environment constraint is redrawn too.
      if (!Validate(space, moved, hook)) continue;
      const double r_delta =
          RunEpisode(env, moved, options.max_frames).cumulative_reward;
      total += SensitivityFromRewards(*r_seed, r_delta, realized);
      done = true;
    }
    if (!done) {
      throw InvalidArgument(
          "sensitivity: perturbation degenerate after retry budget");
    }
  }
  return total / options.draws;
}

void Corpus::Add(CorpusEntry entry) {
  seen_cells_.insert(entry.freshness_cell);
  entries_.push_back(std::move(entry));
  if (capacity_ && entries_.size() > *capacity_) {
    auto lowest = std::min_element(
        entries_.begin(), entries_.end(),
        [](const CorpusEntry& a, const CorpusEntry& b) {
          return a.potential < b.potential;
        });
    entries_.erase(lowest);
  }
}

bool Corpus::Remove(ScenarioId id) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [id](const CorpusEntry& e) {
                           return e.scenario.id == id;
                         });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

const CorpusEntry* Corpus::Find(ScenarioId id) const {
  for (const CorpusEntry& e : entries_) {
    if (e.scenario.id == id) return &e;
  }
  return nullptr;
}

std::vector<double> Corpus::Potentials() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const CorpusEntry& e : entries_) out.push_back(e.potential);
  return out;
}

bool Corpus::IsFreshCell(const CellIndex& cell) const {
  return seen_cells_.count(cell) == 0;
}

std::vector<double> Corpus::Weights(const SeedWeighting& weighting) const {
  double max_rho = 0.0;
  for (const CorpusEntry& e : entries_) max_rho = std::max(max_rho, e.sensitivity);
  const double floor =
      std::max(weighting.absolute_floor, weighting.relative_floor * max_rho);
  std::vector<double> w;
  w.reserve(entries_.size());
  double total = 0.0;
  for (const CorpusEntry& e : entries_) {
    w.push_back(e.sensitivity + floor);
    total += w.back();
  }
  if (!(total > 0.0)) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

std::vector<double> Corpus::SamplingProbabilities(
    const SeedWeighting& weighting) const {
  std::vector<double> w = Weights(weighting);
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

CorpusEntry Corpus::SampleSeed(Rng& rng, const SeedWeighting& weighting) const {
  if (entries_.empty()) throw InvalidArgument("sample_seed: empty corpus");
  const std::vector<double> w = Weights(weighting);
  double total = 0.0;
  for (double x : w) total += x;
  const double target = rng.Canonical() * total;
  double acc = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (target < acc) return entries_[i];
  }
  // Rounding can leave target == total; fall back to the last positive weight.
  for (size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return entries_[i];
  }
  return entries_.back();
}

UpdateOutcome Corpus::UpdateAfterTest(
    const CorpusEntry& seed, const Scenario& scenario,
    const EpisodeResult& result, const CellIndex& terminal_cell,
    int64_t iteration, const std::function<double()>& sensitivity) {
  if (result.failed) {
    Remove(seed.scenario.id);
    return UpdateOutcome::kSeedRemovedFailureRecorded;
  }
  if (result.cumulative_reward < seed.r_seed || IsFreshCell(terminal_cell)) {
    CorpusEntry entry;
    entry.scenario = scenario;
    entry.r_seed = result.cumulative_reward;
    entry.potential = PotentialOf(result);
    entry.sensitivity = sensitivity ? sensitivity() : 0.0;
    entry.freshness_cell = terminal_cell;
    entry.added_at = iteration;
    Add(std::move(entry));
    return UpdateOutcome::kAddedNew;
  }
  return UpdateOutcome::kDiscarded;
}

DiversityGrid FreshnessGrid(const Environment& env, int intervals) {
  return DiversityGrid(env.observation_lower(), env.observation_upper(),
                       intervals);
}

std::vector<double> SampleValidParams(const ScenarioSpace& space,
                                      const ConstraintHook& hook, Rng& rng,
                                      int retry_budget) {
  for (int attempt = 0; attempt <= retry_budget; ++attempt) {
    std::vector<double> params(space.dims());
    for (size_t i = 0; i < params.size(); ++i) {
      params[i] = rng.Uniform(space.lower()[i], space.upper()[i]);
    }
    if (Validate(space, params, hook)) return params;
  }
  throw InvalidArgument("random sampling: constraint rejected every candidate");
}

Corpus InitRandomCorpus(Environment& env, int count, Rng& rng, IdSource& ids,
                        const CorpusInitOptions& options,
                        std::optional<size_t> capacity) {
  if (count < 1) throw InvalidArgument("init_random: count must be >= 1");
  const ScenarioSpace& space = env.space();
  const ConstraintHook hook = env.constraint_hook();
  const DiversityGrid grid = FreshnessGrid(env, options.freshness_intervals);
  SensitivityOptions sens = options.sensitivity;
  sens.max_frames = options.max_frames;

  Corpus corpus(capacity);
  int budget = options.retry_budget;
  while (static_cast<int>(corpus.size()) < count) {
    std::vector<double> params;
    for (;;) {
      if (budget < 0) {
        throw InvalidArgument("init_random: retry budget exhausted");
      }
      std::vector<double> candidate(space.dims());
      for (size_t i = 0; i < candidate.size(); ++i) {
        candidate[i] = rng.Uniform(space.lower()[i], space.upper()[i]);
      }
      if (Validate(space, candidate, hook)) {
        params = std::move(candidate);
        break;
      }
      --budget;
    }
    Scenario scenario{0, std::move(params), std::nullopt,
                      Origin::kInitialSample};
    const EpisodeResult result =
        RunEpisode(env, scenario, options.max_frames);
    if (result.failed && options.reject_failing) {
      if (--budget < 0) {
        throw InvalidArgument("init_random: retry budget exhausted");
      }
      continue;
    }
    scenario.id = ids.Next();
    CorpusEntry entry;
    entry.r_seed = result.cumulative_reward;
    entry.potential = PotentialOf(result);
    entry.freshness_cell = CellIndexOf(result.trajectory.back().observation, grid);
    entry.sensitivity =
        ComputeSensitivity(env, scenario, sens, rng, result.cumulative_reward);
    entry.added_at = 0;
    entry.scenario = std::move(scenario);
    corpus.Add(std::move(entry));
  }
  return corpus;
}

}  // namespace scenfuzz
