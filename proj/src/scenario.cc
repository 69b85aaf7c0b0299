#include "scenfuzz/scenario.h"

#include <algorithm>
#include <cmath>

#include "scenfuzz/error.h"

namespace scenfuzz {

ScenarioSpace::ScenarioSpace(std::vector<double> lower,
                             std::vector<double> upper,
                             std::vector<std::string> dim_names)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      dim_names_(std::move(dim_names)) {
  if (lower_.empty()) throw InvalidArgument("scenario space needs D >= 1");
  if (upper_.size() != lower_.size() || dim_names_.size() != lower_.size()) {
    throw InvalidArgument("scenario space bounds/names length mismatch");
  }
  for (size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw InvalidArgument("scenario space dim " + std::to_string(i) +
                            ": lower bound must be below upper bound");
    }
  }
}

std::string_view OriginName(Origin origin) {
  switch (origin) {
    case Origin::kInitialSample:
      return "initial";
    case Origin::kRandomMutation:
      return "random";
    case Origin::kLlmMutation:
      return "llm";
  }
  return "?";
}

Origin ParseOrigin(std::string_view name) {
  for (Origin o : {Origin::kInitialSample, Origin::kRandomMutation,
                   Origin::kLlmMutation}) {
    if (OriginName(o) == name) return o;
  }
  throw InvalidArgument("unknown scenario origin '" + std::string(name) + "'");
}

const std::string& ValidationResult::reason() const {
  static const std::string kEmpty;
  return reason_ ? *reason_ : kEmpty;
}

ValidationResult Validate(const ScenarioSpace& space,
                          std::span<const double> params,
                          const ConstraintHook& hook) {
  if (params.size() != space.dims()) {
    return ValidationResult::Invalid("length " + std::to_string(params.size()) +
                                     " != " + std::to_string(space.dims()));
  }
  for (size_t i = 0; i < params.size(); ++i) {
    const std::string dim = "dim " + std::to_string(i);
    if (std::isnan(params[i])) {
      return ValidationResult::Invalid(dim + " is NaN");
    }
    if (params[i] < space.lower()[i]) {
      return ValidationResult::Invalid(dim + " below lower bound");
    }
    if (params[i] > space.upper()[i]) {
      return ValidationResult::Invalid(dim + " above upper bound");
    }
  }
  if (hook) {
    if (auto violation = hook(params)) {
      return ValidationResult::Invalid(*violation);
    }
  }
  return ValidationResult::Valid();
}

std::string_view DistanceNormName(DistanceNorm norm) {
  return norm == DistanceNorm::kL2 ? "l2" : "linf";
}

DistanceNorm ParseDistanceNorm(std::string_view name) {
  if (name == "l2") return DistanceNorm::kL2;
  if (name == "linf") return DistanceNorm::kLInf;
  throw InvalidArgument("unknown distance norm '" + std::string(name) +
                        "' (expected l2 or linf)");
}

double Distance(const ScenarioSpace& space, std::span<const double> a,
                std::span<const double> b, DistanceNorm norm) {
  if (a.size() != space.dims() || b.size() != space.dims()) {
    throw InvalidArgument("distance: dimension mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) / space.range(i);
    if (norm == DistanceNorm::kL2) {
      acc += d * d;
    } else {
      acc = std::max(acc, std::abs(d));
    }
  }
  return norm == DistanceNorm::kL2 ? std::sqrt(acc) : acc;
}

double Distance(const ScenarioSpace& space, const Scenario& a,
                const Scenario& b, DistanceNorm norm) {
  return Distance(space, a.params, b.params, norm);
}

std::vector<double> Clip(const ScenarioSpace& space,
                         std::span<const double> params) {
  if (params.size() != space.dims()) {
    throw InvalidArgument("clip: length " + std::to_string(params.size()) +
                          " != " + std::to_string(space.dims()));
  }
  std::vector<double> out(params.begin(), params.end());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(out[i], space.lower()[i], space.upper()[i]);
  }
  return out;
}

}  // namespace scenfuzz
