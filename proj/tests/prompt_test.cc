#include "scenfuzz/prompt.h"

#include <gtest/gtest.h>

#include "scenfuzz/coop_nav.h"
#include "scenfuzz/environment.h"
#include "scenfuzz/error.h"
#include "scenfuzz/rng.h"
#include "scenfuzz/text.h"

namespace scenfuzz {
namespace {

const char kTinyTemplate[] = R"([[role_assignment]]
You generate test scenarios.

[[task_introduction]]
Make the policy fail.

[[overview]]
A point moves in a square.

[[entity_information]]
One point.

[[state_description]]
- x: horizontal position, within [-1, 1]
- y: vertical position, within [-1, 1]

[[constraints]]
- Stay inside the square.

[[generation_workflow]]
1. Scenario Analysis: look.
2. Evolution Prediction: predict.
3. Challenge Analysis: think.
4. Plan Generation: plan.
5. Plan Execution: act.

[[output_format_marker]]
New Scenario:

[[input]]
Seed:
{{seed}}
Feedback:
{{feedback}}
Experience:
{{experience}}
)";

ScenarioSpace Square() { return ScenarioSpace({-1, -1}, {1, 1}, {"x", "y"}); }

TEST(PromptTemplateTest, ParsesSections) {
  const PromptTemplate t = ParsePromptTemplate(kTinyTemplate);
  EXPECT_EQ(t.role_assignment, "You generate test scenarios.");
  ASSERT_EQ(t.state_description.size(), 2u);
  EXPECT_EQ(t.state_description[0].name, "x");
  EXPECT_EQ(t.constraints.size(), 1u);
  EXPECT_EQ(t.generation_workflow.size(), 5u);
  EXPECT_EQ(t.output_format_marker, "New Scenario:");
  EXPECT_TRUE(CheckTemplate(t, Square()).empty());
}

TEST(PromptTemplateTest, UnknownSectionIsConfigError) {
  try {
    ParsePromptTemplate("[[role_assignment]]\nhi\n[[bogus]]\nx\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(PromptTemplateTest, DuplicateSectionIsConfigError) {
  EXPECT_THROW(ParsePromptTemplate("[[overview]]\na\n[[overview]]\nb\n"), Error);
}

TEST(PromptTemplateTest, CheckFindsDimensionMismatch) {
  const PromptTemplate t = ParsePromptTemplate(kTinyTemplate);
  const ScenarioSpace three({0, 0, 0}, {1, 1, 1}, {"x", "y", "z"});
  EXPECT_FALSE(CheckTemplate(t, three).empty());
  const ScenarioSpace renamed({-1, -1}, {1, 1}, {"x", "w"});
  EXPECT_FALSE(CheckTemplate(t, renamed).empty());
}

TEST(PromptTemplateTest, CheckFindsMissingSlotsAndSteps) {
  PromptTemplate t = ParsePromptTemplate(kTinyTemplate);
  t.input = "Seed: {{seed}}";
  EXPECT_EQ(CheckTemplate(t, Square()).size(), 2u);
  t = ParsePromptTemplate(kTinyTemplate);
  std::swap(t.generation_workflow[0], t.generation_workflow[1]);
  EXPECT_FALSE(CheckTemplate(t, Square()).empty());
  t = ParsePromptTemplate(kTinyTemplate);
  t.overview.clear();
  EXPECT_FALSE(CheckTemplate(t, Square()).empty());
}

TEST(PromptTemplateTest, BuiltinTemplatesMatchTheirEnvironments) {
  for (const std::string name : {"collision-avoidance-2d", "coop-nav"}) {
    const auto text = BuiltinTemplateText(name);
    ASSERT_TRUE(text.has_value()) << name;
    auto env = EnvironmentRegistry::Global().Create(name);
    const auto problems = CheckTemplate(ParsePromptTemplate(*text), env->space());
    EXPECT_TRUE(problems.empty()) << name << ": " << problems.front();
  }
  EXPECT_FALSE(BuiltinTemplateText("carla").has_value());
}

TEST(RenderPromptTest, EmptyFeedbackAndExperienceShowNone) {
  const PromptTemplate t = ParsePromptTemplate(kTinyTemplate);
  const std::string p =
      RenderPrompt(t, Square(), std::vector<double>{0.2, -0.5}, FeedbackLedger(),
                   ExpertExperience());
  EXPECT_NE(p.find("Feedback:\nNone"), std::string::npos);
  EXPECT_NE(p.find("Experience:\nNone"), std::string::npos);
  const size_t role = p.find("# Role");
  const size_t info = p.find("## Scenario Information");
  const size_t input = p.find("## Input");
  const size_t output = p.find("## Output");
  ASSERT_NE(role, std::string::npos);
  EXPECT_LT(role, info);
  EXPECT_LT(info, input);
  EXPECT_LT(input, output);
  for (std::string_view step : kWorkflowSteps) {
    EXPECT_NE(p.find(step, output), std::string::npos);
  }
  EXPECT_NE(p.find("New Scenario: [<x>, <y>]"), std::string::npos);
}

TEST(RenderPromptTest, SeedValuesLabeled) {
  const PromptTemplate t = ParsePromptTemplate(kTinyTemplate);
  const std::string p =
      RenderPrompt(t, Square(), std::vector<double>{0.2, -0.5}, FeedbackLedger(),
                   ExpertExperience());
  const size_t input = p.find("## Input");
  EXPECT_NE(p.find("x = 0.2", input), std::string::npos);
  EXPECT_NE(p.find("y = -0.5", input), std::string::npos);
  EXPECT_NE(p.find("Seed Scenario: [0.2, -0.5]", input), std::string::npos);
}

TEST(RenderPromptTest, FeedbackAndExperienceIncluded) {
  const PromptTemplate t = ParsePromptTemplate(kTinyTemplate);
  FeedbackLedger feedback;
  feedback.Add({{0.1, 0.1}, {0.2, 0.2}, BadCaseCategory::kInsufficientChallenge,
                "reward increased by 15 (threshold 10)"});
  ExpertExperience e{{"Move the point toward the corner."}};
  const std::string p =
      RenderPrompt(t, Square(), std::vector<double>{0.2, -0.5}, feedback, e);
  EXPECT_NE(p.find("[InsufficientChallenge]"), std::string::npos);
  EXPECT_NE(p.find("reward increased by 15"), std::string::npos);
  EXPECT_NE(p.find("- Move the point toward the corner."), std::string::npos);
}

TEST(RenderPromptTest, DeterministicAndRejectsBadTemplate) {
  const PromptTemplate t = ParsePromptTemplate(kTinyTemplate);
  const std::vector<double> seed{0.3, 0.4};
  EXPECT_EQ(RenderPrompt(t, Square(), seed, FeedbackLedger(), ExpertExperience()),
            RenderPrompt(t, Square(), seed, FeedbackLedger(), ExpertExperience()));
  const ScenarioSpace three({0, 0, 0}, {1, 1, 1}, {"x", "y", "z"});
  EXPECT_THROW(RenderPrompt(t, three, std::vector<double>{0, 0, 0},
                            FeedbackLedger(), ExpertExperience()),
               Error);
}

TEST(ParseResponseTest, WellFormed) {
  const ParseResult r =
      ParseScenarioResponse("blah\nNew Scenario: [0.2, -0.5]\n", Square(),
                            "New Scenario:");
  ASSERT_TRUE(std::holds_alternative<Scenario>(r));
  const Scenario& s = std::get<Scenario>(r);
  EXPECT_EQ(s.params, (std::vector<double>{0.2, -0.5}));
  EXPECT_EQ(s.origin, Origin::kLlmMutation);
}

TEST(ParseResponseTest, UsesLastMarker) {
  const ParseResult r = ParseScenarioResponse(
      "New Scenario: [0.1, 0.1]\nrevised:\n**New Scenario:** [0.3, 0.4]",
      Square(), "New Scenario:");
  ASSERT_TRUE(std::holds_alternative<Scenario>(r));
  EXPECT_EQ(std::get<Scenario>(r).params, (std::vector<double>{0.3, 0.4}));
}

ParseError::Kind KindOf(const ParseResult& r) {
  EXPECT_TRUE(std::holds_alternative<ParseError>(r));
  return std::get<ParseError>(r).kind;
}

TEST(ParseResponseTest, ErrorClasses) {
  const ScenarioSpace sq = Square();
  EXPECT_EQ(KindOf(ParseScenarioResponse("no marker here", sq, "New Scenario:")),
            ParseError::Kind::kMarkerMissing);
  EXPECT_EQ(KindOf(ParseScenarioResponse("New Scenario: [0.1]", sq,
                                         "New Scenario:")),
            ParseError::Kind::kArityMismatch);
  EXPECT_EQ(KindOf(ParseScenarioResponse("New Scenario: [0.1, abc]", sq,
                                         "New Scenario:")),
            ParseError::Kind::kNumberParseFailure);
  EXPECT_EQ(KindOf(ParseScenarioResponse("New Scenario: 0.1, 0.2", sq,
                                         "New Scenario:")),
            ParseError::Kind::kNumberParseFailure);
  const ParseResult oob =
      ParseScenarioResponse("New Scenario: [1.7, 0.0]", sq, "New Scenario:");
  EXPECT_EQ(KindOf(oob), ParseError::Kind::kOutOfBounds);
  EXPECT_EQ(std::get<ParseError>(oob).dim, 0);
}

TEST(ParseResponseTest, ConstraintHookApplied) {
  CoopNavEnv env;
  const std::string overlapping =
      "New Scenario: [0, 0, 0.05, 0, 0.8, 0.8, -0.8, -0.8, 0.8, -0.8, -0.8, 0.8]";
  EXPECT_EQ(KindOf(ParseScenarioResponse(overlapping, env.space(), "New Scenario:",
                                         env.constraint_hook())),
            ParseError::Kind::kConstraintViolation);
}

TEST(ParseResponseTest, RoundTripIsBitExact) {
  const ScenarioSpace space({-3, 0, 1e-6}, {3, 1e6, 2e-6}, {"a", "b", "c"});
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> p(3);
    for (size_t d = 0; d < 3; ++d) {
      p[d] = rng.Uniform(space.lower()[d], space.upper()[d]);
    }
    const std::string response = "New Scenario: " + FormatVector(p);
    const ParseResult r = ParseScenarioResponse(response, space, "New Scenario:");
    ASSERT_TRUE(std::holds_alternative<Scenario>(r));
    EXPECT_EQ(std::get<Scenario>(r).params, p);
  }
}

}  // namespace
}  // namespace scenfuzz
