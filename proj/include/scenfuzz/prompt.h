#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scenfuzz/feedback.h"
#include "scenfuzz/scenario.h"

namespace scenfuzz {

// Label that introduces the bracketed seed parameters in the Input block.
inline constexpr std::string_view kSeedScenarioLabel = "Seed Scenario:";
inline constexpr std::string_view kDefaultOutputMarker = "New Scenario:";

// The five reasoning steps the Output block walks the model through, in
// order.
inline constexpr std::string_view kWorkflowSteps[] = {
    "Scenario Analysis", "Evolution Prediction", "Challenge Analysis",
    "Plan Generation", "Plan Execution"};

struct StateDimension {
  std::string name;
  std::string description;
};

// Environment-specific prompt content. Loaded from a plain-text file made of
// "[[section]]" headers; see templates/ for the shipped examples.
struct PromptTemplate {
  std::string role_assignment;
  std::string task_introduction;
  std::string overview;
  std::string entity_information;
  // One "- name: description" line per scenario dimension, in order.
  std::vector<StateDimension> state_description;
  std::vector<std::string> constraints;
  // "N. Step Name: instructions" lines; step names must follow
  // kWorkflowSteps.
  std::vector<std::string> generation_workflow;
  std::string output_format_marker = std::string(kDefaultOutputMarker);
  // Input block body with {{seed}}, {{feedback}} and {{experience}} slots.
  std::string input;
};

// Parses template text. Throws Error(kConfig) on unknown or duplicate
// sections and malformed list lines.
PromptTemplate ParsePromptTemplate(std::string_view text);
PromptTemplate LoadPromptTemplate(const std::string& path);

// Template text compiled into the library for a built-in environment, or
// nullopt when none ships.
std::optional<std::string> BuiltinTemplateText(std::string_view env_name);

// Problems that make the template unusable with `space`; empty when valid.
std::vector<std::string> CheckTemplate(const PromptTemplate& tmpl,
                                       const ScenarioSpace& space);

// Labeled parameter lines followed by "Seed Scenario: [...]".
std::string RenderSeed(const ScenarioSpace& space,
                       std::span<const double> params);
std::string RenderFeedback(const FeedbackLedger& feedback);
std::string RenderExperience(const ExpertExperience& experience);

// Emits the Role, Scenario Information, Input and Output blocks in that
// order. Throws Error(kConfig) if CheckTemplate reports problems.
std::string RenderPrompt(const PromptTemplate& tmpl, const ScenarioSpace& space,
                         std::span<const double> seed_params,
                         const FeedbackLedger& feedback,
                         const ExpertExperience& experience);

struct ParseError {
  enum class Kind {
    kMarkerMissing,
    kArityMismatch,
    kNumberParseFailure,
    kOutOfBounds,
    kConstraintViolation,
  };
  Kind kind = Kind::kMarkerMissing;
  // Offending dimension for kOutOfBounds, otherwise -1.
  int dim = -1;
  std::string message;
  // Whatever numbers were recovered, for feedback.
  std::vector<double> values;
};

std::string_view ParseErrorKindName(ParseError::Kind kind);

using ParseResult = std::variant<Scenario, ParseError>;

// Reads the bracketed list after the last occurrence of `marker` and checks
// it against the space (and `hook`, when given). The returned scenario has
// origin kLlmMutation and id 0.
ParseResult ParseScenarioResponse(std::string_view response,
                                  const ScenarioSpace& space,
                                  std::string_view marker,
                                  const ConstraintHook& hook = {});

}  // namespace scenfuzz
