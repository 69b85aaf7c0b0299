#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenfuzz/environment.h"
#include "scenfuzz/generator.h"
#include "scenfuzz/scenario.h"

namespace scenfuzz {

enum class Method { kLlmTester, kLlmTesterNoMs, kMdpFuzz, kRandom };
std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);
bool UsesLlm(Method method);

enum class BackendKind { kHeuristic, kMock, kHttp };
std::string_view BackendKindName(BackendKind kind);
BackendKind ParseBackendKind(std::string_view name);

enum class FailureRateMode { kCumulative, kWindowed };

// Resolved campaign settings. The TOML layout mirrors the groups below:
// [campaign], [generator], [llm], [thresholds] and [environment].
struct CampaignConfig {
  // [campaign]
  std::string environment = "collision-avoidance-2d";
  Method method = Method::kLlmTester;
  int64_t budget = 3000;
  int max_frames = 100;
  int corpus_size = 50;
  // 0 means unbounded.
  int64_t corpus_capacity = 0;
  uint64_t seed = 42;
  // Empty: nothing is written.
  std::string output_dir;
  int64_t checkpoint_every = 100;
  int diversity_intervals = 10;
  int freshness_intervals = 10;
  double sensitivity_amplitude = 0.05;
  int sensitivity_draws = 1;
  double weight_floor = 1e-3;
  FailureRateMode failure_rate = FailureRateMode::kCumulative;
  int64_t failure_rate_window = 100;
  // Abort after this many generations in a row produced nothing testable.
  int max_consecutive_skips = 50;

  // [generator]
  GeneratorParams generator;

  // [llm]
  BackendKind backend = BackendKind::kHeuristic;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  double temperature = 1.0;
  double timeout_s = 60.0;
  int max_retries = 3;
  int parse_attempts = 2;
  int transport_retries = 2;
  int feedback_cap = 5;
  // Empty: the template compiled in for the environment.
  std::string template_path;
  std::vector<std::string> experience;
  std::vector<std::string> mock_responses;

  // [thresholds]
  // Reward-increase threshold; unset means reward_fraction of the reward
  // range observed over the initial corpus.
  std::optional<double> reward;
  double reward_fraction = 0.1;
  double distance = 0.25;
  DistanceNorm norm = DistanceNorm::kL2;

  // [environment]
  EnvParams env_params;

  bool operator==(const CampaignConfig&) const = default;
};

// Shipped defaults for an environment (max frames, test budget and the
// multi-scale parameters).
CampaignConfig DefaultConfig(const std::string& environment);

// Parses TOML text; `overrides` are "section.key=value" strings (bare keys
// refer to [campaign]) applied before validation. Unknown sections or keys
// throw Error(kConfig).
CampaignConfig ParseConfig(std::string_view toml_text,
                           const std::vector<std::string>& overrides = {});
CampaignConfig LoadConfig(const std::string& path,
                          const std::vector<std::string>& overrides = {});

// Applies overrides to an already resolved config.
CampaignConfig WithOverrides(const CampaignConfig& config,
                             const std::vector<std::string>& overrides);

// Resolved config as TOML; ParseConfig(ConfigToToml(c)) == c.
std::string ConfigToToml(const CampaignConfig& config);

// Throws Error(kConfig) describing the first invalid setting.
void ValidateConfig(const CampaignConfig& config);

}  // namespace scenfuzz
