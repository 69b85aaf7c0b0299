#include "scenfuzz/feedback.h"

#include "scenfuzz/error.h"
#include "scenfuzz/text.h"

namespace scenfuzz {

std::string_view BadCaseCategoryName(BadCaseCategory category) {
  switch (category) {
    case BadCaseCategory::kInsufficientChallenge:
      return "InsufficientChallenge";
    case BadCaseCategory::kInvalidity:
      return "Invalidity";
    case BadCaseCategory::kExcessiveModification:
      return "ExcessiveModification";
  }
  return "?";
}

FeedbackLedger::FeedbackLedger(size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InvalidArgument("feedback ledger capacity must be >= 1");
}

void FeedbackLedger::Add(BadCase bad_case) {
  ++counts_[static_cast<size_t>(bad_case.category)];
  cases_.push_back(std::move(bad_case));
  while (cases_.size() > capacity_) cases_.pop_front();
}

std::optional<BadCase> ClassifyBadCase(const ScenarioSpace& space,
                                       std::span<const double> seed_params,
                                       double r_seed,
                                       const GenerationOutcome& outcome,
                                       const BadCaseThresholds& thresholds) {
  if (!(thresholds.reward > 0.0) || !(thresholds.distance > 0.0)) {
    throw InvalidArgument("classify_bad_case: thresholds must be positive");
  }
  BadCase bad;
  bad.seed_params.assign(seed_params.begin(), seed_params.end());
  bad.new_params = outcome.new_params;

  if (outcome.invalid_reason) {
    bad.category = BadCaseCategory::kInvalidity;
    bad.detail = *outcome.invalid_reason;
    return bad;
  }
  const double distance =
      Distance(space, seed_params, outcome.new_params, thresholds.norm);
  if (distance > thresholds.distance) {
    bad.category = BadCaseCategory::kExcessiveModification;
    bad.detail = "normalized distance " + FormatDouble(distance) +
                 " exceeds " + FormatDouble(thresholds.distance);
    return bad;
  }
  if (!outcome.r_new) {
    throw InvalidArgument("classify_bad_case: valid outcome without reward");
  }
  const double increase = *outcome.r_new - r_seed;
  if (increase > thresholds.reward) {
    bad.category = BadCaseCategory::kInsufficientChallenge;
    bad.detail = "reward increased by " + FormatDouble(increase) +
                 " (threshold " + FormatDouble(thresholds.reward) + ")";
    return bad;
  }
  return std::nullopt;
}

}  // namespace scenfuzz
