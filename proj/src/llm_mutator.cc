#include "scenfuzz/llm_mutator.h"

#include <algorithm>

#include "scenfuzz/error.h"

namespace scenfuzz {

Scenario MutateViaLlm(LlmBackend& backend, const PromptTemplate& tmpl,
                      const CorpusEntry& seed, FeedbackLedger& feedback,
                      const ExpertExperience& experience,
                      const ScenarioSpace& space, const ConstraintHook& hook,
                      const LlmMutatorOptions& options, ScenarioId id,
                      LlmCallStats* stats) {
  const std::string prompt =
      RenderPrompt(tmpl, space, seed.scenario.params, feedback, experience);
  ChatRequest request;
  request.temperature = options.temperature;
  request.messages = {{"system", tmpl.role_assignment}, {"user", prompt}};

  ParseError last_error;
  for (int attempt = 0; attempt < std::max(1, options.parse_attempts);
       ++attempt) {
    std::string response;
    for (int transport = 0;; ++transport) {
      try {
        if (stats) ++stats->requests;
        response = backend.Complete(request);
        break;
      } catch (const TransportError& e) {
        if (transport >= options.transport_retries) {
          throw Error(ErrorCode::kBackendUnreachable,
                      std::string("llm backend unreachable: ") + e.what());
        }
      }
    }
    if (stats) stats->last_response = response;

    ParseResult parsed = ParseScenarioResponse(
        response, space, tmpl.output_format_marker, hook);
    if (auto* scenario = std::get_if<Scenario>(&parsed)) {
      scenario->id = id;
      scenario->parent = seed.scenario.id;
      scenario->origin = Origin::kLlmMutation;
      return std::move(*scenario);
    }
    last_error = std::get<ParseError>(std::move(parsed));
    if (stats) ++stats->parse_failures;
  }

  BadCase bad;
  bad.seed_params = seed.scenario.params;
  bad.new_params = last_error.values;
  bad.category = BadCaseCategory::kInvalidity;
  bad.detail = std::string(ParseErrorKindName(last_error.kind)) + ": " +
               last_error.message;
  feedback.Add(bad);
  throw Error(ErrorCode::kGeneration, "llm generation failed: " + bad.detail);
}

LlmMutator::LlmMutator(LlmBackend& backend, PromptTemplate tmpl,
                       const ScenarioSpace& space, ConstraintHook hook,
                       LlmMutatorOptions options)
    : backend_(backend),
      template_(std::move(tmpl)),
      space_(space),
      hook_(std::move(hook)),
      options_(options) {}

Scenario LlmMutator::Mutate(const CorpusEntry& seed, FeedbackLedger& feedback,
                            const ExpertExperience& experience, ScenarioId id) {
  return MutateViaLlm(backend_, template_, seed, feedback, experience, space_,
                      hook_, options_, id, &stats_);
}

}  // namespace scenfuzz
