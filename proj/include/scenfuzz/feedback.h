#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenfuzz/scenario.h"

namespace scenfuzz {

enum class BadCaseCategory {
  kInsufficientChallenge,
  kInvalidity,
  kExcessiveModification,
};

std::string_view BadCaseCategoryName(BadCaseCategory category);

// A generated scenario rejected by the feedback criteria.
struct BadCase {
  std::vector<double> seed_params;
  std::vector<double> new_params;
  BadCaseCategory category = BadCaseCategory::kInvalidity;
  std::string detail;
};

// Most recent bad cases, oldest evicted first once `capacity` is reached.
// Per-category totals count every case ever added.
class FeedbackLedger {
 public:
  explicit FeedbackLedger(size_t capacity = 5);

  void Add(BadCase bad_case);
  const std::deque<BadCase>& cases() const { return cases_; }
  size_t capacity() const { return capacity_; }
  size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  size_t count(BadCaseCategory category) const {
    return counts_[static_cast<size_t>(category)];
  }

 private:
  size_t capacity_;
  std::deque<BadCase> cases_;
  std::array<size_t, 3> counts_{};
};

// Free-text mutation plans supplied by the tester; may be empty.
struct ExpertExperience {
  std::vector<std::string> plans;
};

struct BadCaseThresholds {
  // Reward increase above which a generation is an Insufficient Challenge.
  double reward = 1.0;
  // Normalized distance above which a generation is an Excessive
  // Modification.
  double distance = 0.25;
  DistanceNorm norm = DistanceNorm::kL2;
};

// What became of a generated scenario. When `invalid_reason` is set the
// scenario never ran and `new_params`/`r_new` may be empty/unset.
struct GenerationOutcome {
  std::optional<std::string> invalid_reason;
  std::vector<double> new_params;
  std::optional<double> r_new;
};

// Applies the criteria with precedence Invalidity > Excessive Modification >
// Insufficient Challenge; returns nullopt for an acceptable generation.
std::optional<BadCase> ClassifyBadCase(const ScenarioSpace& space,
                                       std::span<const double> seed_params,
                                       double r_seed,
                                       const GenerationOutcome& outcome,
                                       const BadCaseThresholds& thresholds);

}  // namespace scenfuzz
