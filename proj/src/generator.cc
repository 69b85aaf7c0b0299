#include "scenfuzz/generator.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "scenfuzz/error.h"

namespace scenfuzz {

GeneratorState::GeneratorState(const GeneratorParams& params)
    : alpha_(params.alpha),
      beta_(params.beta),
      delta_(params.delta),
      amplitude_(params.amplitude) {
  if (!(alpha_ > 0.0 && alpha_ <= kMaxAlpha)) {
    throw InvalidArgument("generator: alpha must be in (0, 100]");
  }
  if (!(beta_ > 0.0 && beta_ < 1.0)) {
    throw InvalidArgument("generator: beta must be in (0, 1)");
  }
  if (!(delta_ >= 0.0)) throw InvalidArgument("generator: delta must be >= 0");
  if (!(amplitude_ > 0.0)) {
    throw InvalidArgument("generator: amplitude must be positive");
  }
}

AlphaUpdate GeneratorState::UpdateAlpha(double new_rate) {
  if (!(new_rate >= 0.0 && new_rate <= 1.0)) {
    throw InvalidArgument("update_alpha: failure rate outside [0, 1]");
  }
  if (!last_rate_) {
    last_rate_ = new_rate;
    return AlphaUpdate::kInitialized;
  }
  const double f = *last_rate_;
  if (new_rate < (1.0 - delta_) * f) {
    alpha_ = std::max(alpha_ * beta_, kMinAlpha);
    last_rate_ = new_rate;
    return AlphaUpdate::kDecayed;
  }
  if (new_rate > (1.0 + delta_) * f) {
    alpha_ = std::min(alpha_ / beta_, kMaxAlpha);
    last_rate_ = new_rate;
    return AlphaUpdate::kRaised;
  }
  return AlphaUpdate::kUnchanged;
}

Scenario RandomMutation(const ScenarioSpace& space, const Scenario& seed,
                        double amplitude, Rng& rng, ScenarioId id) {
  if (!(amplitude > 0.0)) {
    throw InvalidArgument("random_mutation: amplitude must be positive");
  }
  std::vector<double> params(seed.params);
  for (size_t i = 0; i < params.size(); ++i) {
    const double half = amplitude * space.range(i);
    params[i] += rng.Uniform(-half, half);
  }
  return Scenario{id, Clip(space, params), seed.id, Origin::kRandomMutation};
}

double Percentile(std::span<const double> values, double q) {
  if (values.empty()) throw InvalidArgument("percentile: empty list");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument("percentile: q outside [0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (q == 0.0) return sorted.front();
  const double n = static_cast<double>(sorted.size());
  double rank = q * n;
  // 1 - alpha/100 is rarely exact in binary; snap ranks within rounding
  // noise of an integer so e.g. q = 0.7, n = 10 selects the 7th value.
  const double nearest = std::round(rank);
  if (std::abs(rank - nearest) < 1e-9 * std::max(1.0, n)) rank = nearest;
  const size_t k = static_cast<size_t>(std::ceil(rank));
  return sorted[std::clamp<size_t>(k, 1, sorted.size()) - 1];
}

PotentialClass ClassifyPotential(double p_s,
                                 std::span<const double> corpus_potentials,
                                 double alpha) {
  if (corpus_potentials.empty()) {
    throw InvalidArgument("classify_potential: empty corpus potentials");
  }
  const double q = std::clamp(1.0 - alpha / 100.0, 0.0, 1.0);
  const double threshold = Percentile(corpus_potentials, q);
  return p_s < threshold ? PotentialClass::kLow : PotentialClass::kHigh;
}

Scenario Generate(GeneratorState& state, const ScenarioSpace& space,
                  const CorpusEntry& seed,
                  std::span<const double> corpus_potentials,
                  ScenarioMutator& llm, FeedbackLedger& feedback,
                  const ExpertExperience& experience, Rng& rng, ScenarioId id) {
  if (ClassifyPotential(seed.potential, corpus_potentials, state.alpha()) ==
      PotentialClass::kLow) {
    state.CountLlmDispatch();
    return llm.Mutate(seed, feedback, experience, id);
  }
  state.CountRandomDispatch();
  return RandomMutation(space, seed.scenario, state.amplitude(), rng, id);
}

}  // namespace scenfuzz
