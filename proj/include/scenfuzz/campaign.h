#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenfuzz/config.h"
#include "scenfuzz/environment.h"
#include "scenfuzz/evaluation.h"
#include "scenfuzz/feedback.h"
#include "scenfuzz/llm_backend.h"
#include "scenfuzz/scenario.h"

namespace scenfuzz {

inline constexpr int kSchemaVersion = 1;

// One line of failures.jsonl.
struct FailureRecord {
  // 0-based position in failures.jsonl.
  int64_t index = 0;
  // 1-based test iteration that found the failure.
  int64_t iteration = 0;
  ScenarioId id = 0;
  std::optional<ScenarioId> parent;
  Origin origin = Origin::kInitialSample;
  std::vector<double> params;
  int frames = 0;
  std::string failure_kind;
  double reward = 0.0;

  bool operator==(const FailureRecord&) const = default;
};

std::string FailureRecordToJson(const FailureRecord& record);
// Throws Error(kIo) on malformed lines or an unsupported schema_version.
FailureRecord ParseFailureRecord(std::string_view line);
std::vector<FailureRecord> LoadFailureRecords(const std::string& path);

struct CampaignReport {
  std::string environment;
  Method method = Method::kLlmTester;
  uint64_t seed = 0;
  int64_t budget = 0;

  int64_t tests_run = 0;
  int64_t failures = 0;
  double failure_rate = 0.0;
  // Per test iteration; all have length tests_run.
  std::vector<int64_t> cumulative_failures;
  std::vector<double> failure_rate_series;
  // Alpha in effect when the iteration's scenario was generated; NaN for
  // methods without multi-scale dispatch.
  std::vector<double> alpha_series;
  std::vector<Origin> origins;

  // Over replayed failure trajectories; unset when nothing failed.
  std::optional<DiversityCounts> diversity;
  int diversity_intervals = 10;

  int64_t llm_calls = 0;
  int64_t random_calls = 0;
  // Backend round trips, including retries after unparsable replies.
  int64_t llm_requests = 0;
  // Alpha after every update_alpha call (including the initializing one).
  std::vector<double> alpha_trace;
  int64_t alpha_updates = 0;
  double final_alpha = 0.0;

  // Corpus-update outcomes; failures + added + discarded == tests_run.
  int64_t added = 0;
  int64_t discarded = 0;
  // Generations that produced nothing to roll out.
  int64_t skipped = 0;
  // Times the corpus ran empty and was re-initialized.
  int64_t reseeds = 0;
  int64_t bad_invalidity = 0;
  int64_t bad_excessive = 0;
  int64_t bad_insufficient = 0;
  // Reward threshold actually used for Insufficient Challenge.
  double reward_threshold = 0.0;

  double wall_clock_s = 0.0;
  std::vector<FailureRecord> failure_records;
};

// Backend for LLM methods as selected by the config (SCENFUZZ_API_KEY
// supplies the key for the HTTP backend).
std::unique_ptr<LlmBackend> MakeBackend(const CampaignConfig& config);

// Runs the generate-test-feedback loop until `budget` rollouts completed and
// writes artifacts to config.output_dir when set. `backend` overrides the
// configured backend for LLM methods.
CampaignReport RunCampaign(const CampaignConfig& config,
                           LlmBackend* backend = nullptr);

// Re-runs a recorded failure and returns its trajectory. Throws
// Error(kReplayDivergence) unless it fails again at the same frame with the
// same failure kind.
Trajectory ReplayFailure(const FailureRecord& record, Environment& env,
                         int max_frames);

// Deterministic summary tables (no timings).
std::string RenderResults(const CampaignReport& report);
std::string RenderReportMarkdown(const CampaignReport& report,
                                 const CampaignConfig& config);

// Rebuilds the report numbers from an output directory (config.snapshot,
// failures.jsonl, metrics.csv), replaying every failure.
CampaignReport RecomputeReport(const std::string& output_dir);

// The "## Results" section of a report.md.
std::string ExtractResultsSection(std::string_view report_markdown);

struct ComparisonRow {
  Method method = Method::kLlmTester;
  int64_t tests_run = 0;
  int64_t failures = 0;
  double failure_rate = 0.0;
  std::optional<DiversityCounts> diversity;
  int64_t llm_calls = 0;
  int64_t random_calls = 0;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<CampaignReport> reports;
  // Checked statements, e.g. the llm_calls ordering between the multi-scale
  // and single-scale arms.
  std::vector<std::string> assertions;
};

// Runs every config; they must share environment, budget and seed (throws
// Error(kConfig) otherwise).
Comparison CompareMethods(const std::vector<CampaignConfig>& configs,
                          LlmBackend* backend = nullptr);
std::string RenderComparison(const Comparison& comparison);

}  // namespace scenfuzz
