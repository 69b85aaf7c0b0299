#pragma once

#include <cstdint>
#include <string>

#include "scenfuzz/corpus.h"
#include "scenfuzz/feedback.h"
#include "scenfuzz/generator.h"
#include "scenfuzz/llm_backend.h"
#include "scenfuzz/prompt.h"

namespace scenfuzz {

struct LlmMutatorOptions {
  // Backend calls allowed per generation when replies do not parse.
  int parse_attempts = 2;
  // Extra attempts after a TransportError before giving up.
  int transport_retries = 2;
  double temperature = 1.0;
};

struct LlmCallStats {
  int64_t requests = 0;
  int64_t parse_failures = 0;
  std::string last_response;
};

// Renders the prompt for `seed`, queries the backend and parses the reply.
// When no attempt yields a valid scenario, one Invalidity bad case is added
// to `feedback` and Error(kGeneration) is thrown. Transport failures beyond
// the retry budget surface as Error(kBackendUnreachable).
Scenario MutateViaLlm(LlmBackend& backend, const PromptTemplate& tmpl,
                      const CorpusEntry& seed, FeedbackLedger& feedback,
                      const ExpertExperience& experience,
                      const ScenarioSpace& space, const ConstraintHook& hook,
                      const LlmMutatorOptions& options, ScenarioId id,
                      LlmCallStats* stats = nullptr);

// ScenarioMutator adapter over MutateViaLlm.
class LlmMutator : public ScenarioMutator {
 public:
  LlmMutator(LlmBackend& backend, PromptTemplate tmpl,
             const ScenarioSpace& space, ConstraintHook hook,
             LlmMutatorOptions options = {});

  Scenario Mutate(const CorpusEntry& seed, FeedbackLedger& feedback,
                  const ExpertExperience& experience, ScenarioId id) override;

  const LlmCallStats& stats() const { return stats_; }

 private:
  LlmBackend& backend_;
  PromptTemplate template_;
  const ScenarioSpace& space_;
  ConstraintHook hook_;
  LlmMutatorOptions options_;
  LlmCallStats stats_;
};

}  // namespace scenfuzz
