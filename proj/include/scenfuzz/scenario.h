#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scenfuzz {

using ScenarioId = uint64_t;

// Box-bounded parameter space that every scenario lives in.
class ScenarioSpace {
 public:
  // Throws Error(kInvalidArgument) unless 1 <= D, all vectors have length D
  // and lower[i] < upper[i].
  ScenarioSpace(std::vector<double> lower, std::vector<double> upper,
                std::vector<std::string> dim_names);

  size_t dims() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<std::string>& dim_names() const { return dim_names_; }
  double range(size_t i) const { return upper_[i] - lower_[i]; }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::string> dim_names_;
};

enum class Origin { kInitialSample, kRandomMutation, kLlmMutation };

std::string_view OriginName(Origin origin);
// Inverse of OriginName; throws on unknown names.
Origin ParseOrigin(std::string_view name);

// Hands out monotonically increasing scenario ids within a run.
class IdSource {
 public:
  explicit IdSource(ScenarioId first = 1) : next_(first) {}
  ScenarioId Next() { return next_++; }
  ScenarioId peek() const { return next_; }

 private:
  ScenarioId next_;
};

struct Scenario {
  ScenarioId id = 0;
  std::vector<double> params;
  std::optional<ScenarioId> parent;
  Origin origin = Origin::kInitialSample;
};

class ValidationResult {
 public:
  static ValidationResult Valid() { return ValidationResult(std::nullopt); }
  static ValidationResult Invalid(std::string reason) {
    return ValidationResult(std::move(reason));
  }

  bool ok() const { return !reason_.has_value(); }
  explicit operator bool() const { return ok(); }
  // Empty when valid.
  const std::string& reason() const;

  bool operator==(const ValidationResult&) const = default;

 private:
  explicit ValidationResult(std::optional<std::string> reason)
      : reason_(std::move(reason)) {}
  std::optional<std::string> reason_;
};

// Environment-specific extra constraint; returns a violation description or
// nullopt. Only called on parameter vectors that already satisfy the bounds.
using ConstraintHook =
    std::function<std::optional<std::string>(std::span<const double>)>;

ValidationResult Validate(const ScenarioSpace& space,
                          std::span<const double> params,
                          const ConstraintHook& hook = {});

enum class DistanceNorm { kL2, kLInf };

std::string_view DistanceNormName(DistanceNorm norm);
DistanceNorm ParseDistanceNorm(std::string_view name);

// Norm of the range-normalized difference (each coordinate divided by
// upper - lower). Throws on arity mismatch.
double Distance(const ScenarioSpace& space, std::span<const double> a,
                std::span<const double> b,
                DistanceNorm norm = DistanceNorm::kL2);
double Distance(const ScenarioSpace& space, const Scenario& a,
                const Scenario& b, DistanceNorm norm = DistanceNorm::kL2);

std::vector<double> Clip(const ScenarioSpace& space,
                         std::span<const double> params);

}  // namespace scenfuzz
