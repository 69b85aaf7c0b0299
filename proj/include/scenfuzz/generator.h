#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "scenfuzz/corpus.h"
#include "scenfuzz/feedback.h"
#include "scenfuzz/rng.h"
#include "scenfuzz/scenario.h"

namespace scenfuzz {

struct GeneratorParams {
  // Share (percent) of the corpus, by potential, treated as high potential.
  double alpha = 25.0;
  // Decay factor applied to alpha.
  double beta = 0.7;
  // Tolerance band on failure-rate changes.
  double delta = 0.1;
  // Random-mutation half-width as a fraction of each dimension's range.
  double amplitude = 0.05;

  bool operator==(const GeneratorParams&) const = default;
};

enum class AlphaUpdate { kInitialized, kDecayed, kRaised, kUnchanged };

// Multi-scale generator parameters plus dispatch counters. Owned by the
// campaign loop.
class GeneratorState {
 public:
  static constexpr double kMaxAlpha = 100.0;
  static constexpr double kMinAlpha = 1e-9;

  // Throws unless 0 < alpha <= 100, 0 < beta < 1, delta >= 0, amplitude > 0.
  explicit GeneratorState(const GeneratorParams& params);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double delta() const { return delta_; }
  double amplitude() const { return amplitude_; }
  std::optional<double> last_rate() const { return last_rate_; }
  int64_t llm_calls() const { return llm_calls_; }
  int64_t random_calls() const { return random_calls_; }

  // Adaptive threshold update, invoked once per newly found failure with the
  // current failure rate. The first call only records the rate. Afterwards
  // alpha is multiplied by beta when the rate drops below (1 - delta) * f,
  // divided by beta (capped at 100) when it rises above (1 + delta) * f, and
  // f is replaced only when alpha changes. Throws if the rate is outside
  // [0, 1].
  AlphaUpdate UpdateAlpha(double new_rate);

  void CountLlmDispatch() { ++llm_calls_; }
  void CountRandomDispatch() { ++random_calls_; }

 private:
  double alpha_;
  double beta_;
  double delta_;
  double amplitude_;
  std::optional<double> last_rate_;
  int64_t llm_calls_ = 0;
  int64_t random_calls_ = 0;
};

// seed + U(-a * range_i, a * range_i) per dimension, clipped into bounds.
Scenario RandomMutation(const ScenarioSpace& space, const Scenario& seed,
                        double amplitude, Rng& rng, ScenarioId id);

// Nearest-rank percentile: sorted[ceil(q * n) - 1] for q > 0, the minimum for
// q == 0. Throws on empty input or q outside [0, 1].
double Percentile(std::span<const double> values, double q);

enum class PotentialClass { kHigh, kLow };

// Low potential iff p_s < Percentile(corpus_potentials, 1 - alpha / 100).
PotentialClass ClassifyPotential(double p_s,
                                 std::span<const double> corpus_potentials,
                                 double alpha);

// Large-scale mutator backed by a language model.
class ScenarioMutator {
 public:
  virtual ~ScenarioMutator() = default;
  // Throws Error(kGeneration) when no usable scenario came back.
  virtual Scenario Mutate(const CorpusEntry& seed, FeedbackLedger& feedback,
                          const ExpertExperience& experience,
                          ScenarioId id) = 0;
};

// Multi-scale dispatch: low-potential seeds go to the language-model
// mutator, high-potential seeds get a small random mutation. Mutator errors
// propagate (the dispatch is still counted).
Scenario Generate(GeneratorState& state, const ScenarioSpace& space,
                  const CorpusEntry& seed,
                  std::span<const double> corpus_potentials,
                  ScenarioMutator& llm, FeedbackLedger& feedback,
                  const ExpertExperience& experience, Rng& rng, ScenarioId id);

}  // namespace scenfuzz
