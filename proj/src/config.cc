#include "scenfuzz/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "scenfuzz/error.h"
#include "scenfuzz/text.h"

namespace scenfuzz {
namespace {

Error ConfigError(const std::string& what) {
  return Error(ErrorCode::kConfig, "config: " + what);
}

template <typename T>
T Get(const toml::node& node, const std::string& key) {
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = node.value<double>()) return *v;
    throw ConfigError(key + " must be a number");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node.value<std::string>()) return *v;
    throw ConfigError(key + " must be a string");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node.value<bool>()) return *v;
    throw ConfigError(key + " must be a boolean");
  } else {
    if (!node.is_integer()) throw ConfigError(key + " must be an integer");
    return static_cast<T>(*node.value<int64_t>());
  }
}

std::vector<std::string> GetStrings(const toml::node& node,
                                    const std::string& key) {
  const toml::array* arr = node.as_array();
  if (!arr) throw ConfigError(key + " must be an array of strings");
  std::vector<std::string> out;
  for (const toml::node& item : *arr) out.push_back(Get<std::string>(item, key));
  return out;
}

using Setter = std::function<void(CampaignConfig&, const toml::node&)>;
using SectionSetters = std::map<std::string, Setter>;

template <typename T, typename Field>
Setter Set(Field field, const std::string& key) {
  return [field, key](CampaignConfig& c, const toml::node& n) {
    field(c) = Get<T>(n, key);
  };
}

#define SCENFUZZ_FIELD(type, section, name, member)                 \
  {                                                                 \
    #name, Set<type>([](CampaignConfig& c) -> auto& { return member; }, \
                     section "." #name)                             \
  }

const std::map<std::string, SectionSetters>& Setters() {
  static const auto* setters = new std::map<std::string, SectionSetters>{
      {"campaign",
       {
           SCENFUZZ_FIELD(std::string, "campaign", environment, c.environment),
           {"method",
            [](CampaignConfig& c, const toml::node& n) {
              c.method = ParseMethod(Get<std::string>(n, "campaign.method"));
            }},
           SCENFUZZ_FIELD(int64_t, "campaign", budget, c.budget),
           SCENFUZZ_FIELD(int, "campaign", max_frames, c.max_frames),
           SCENFUZZ_FIELD(int, "campaign", corpus_size, c.corpus_size),
           SCENFUZZ_FIELD(int64_t, "campaign", corpus_capacity, c.corpus_capacity),
           SCENFUZZ_FIELD(uint64_t, "campaign", seed, c.seed),
           SCENFUZZ_FIELD(std::string, "campaign", output_dir, c.output_dir),
           SCENFUZZ_FIELD(int64_t, "campaign", checkpoint_every, c.checkpoint_every),
           SCENFUZZ_FIELD(int, "campaign", diversity_intervals, c.diversity_intervals),
           SCENFUZZ_FIELD(int, "campaign", freshness_intervals, c.freshness_intervals),
           SCENFUZZ_FIELD(double, "campaign", sensitivity_amplitude,
                          c.sensitivity_amplitude),
           SCENFUZZ_FIELD(int, "campaign", sensitivity_draws, c.sensitivity_draws),
           SCENFUZZ_FIELD(double, "campaign", weight_floor, c.weight_floor),
           {"failure_rate",
            [](CampaignConfig& c, const toml::node& n) {
              const auto v = Get<std::string>(n, "campaign.failure_rate");
              if (v == "cumulative") {
                c.failure_rate = FailureRateMode::kCumulative;
              } else if (v == "windowed") {
                c.failure_rate = FailureRateMode::kWindowed;
              } else {
                throw ConfigError(
                    "campaign.failure_rate must be cumulative or windowed");
              }
            }},
           SCENFUZZ_FIELD(int64_t, "campaign", failure_rate_window,
                          c.failure_rate_window),
           SCENFUZZ_FIELD(int, "campaign", max_consecutive_skips,
                          c.max_consecutive_skips),
       }},
      {"generator",
       {
           SCENFUZZ_FIELD(double, "generator", alpha, c.generator.alpha),
           SCENFUZZ_FIELD(double, "generator", beta, c.generator.beta),
           SCENFUZZ_FIELD(double, "generator", delta, c.generator.delta),
           SCENFUZZ_FIELD(double, "generator", amplitude, c.generator.amplitude),
       }},
      {"llm",
       {
           {"backend",
            [](CampaignConfig& c, const toml::node& n) {
              c.backend = ParseBackendKind(Get<std::string>(n, "llm.backend"));
            }},
           SCENFUZZ_FIELD(std::string, "llm", base_url, c.base_url),
           SCENFUZZ_FIELD(std::string, "llm", model, c.model),
           SCENFUZZ_FIELD(double, "llm", temperature, c.temperature),
           SCENFUZZ_FIELD(double, "llm", timeout_s, c.timeout_s),
           SCENFUZZ_FIELD(int, "llm", max_retries, c.max_retries),
           SCENFUZZ_FIELD(int, "llm", parse_attempts, c.parse_attempts),
           SCENFUZZ_FIELD(int, "llm", transport_retries, c.transport_retries),
           SCENFUZZ_FIELD(int, "llm", feedback_cap, c.feedback_cap),
           SCENFUZZ_FIELD(std::string, "llm", template_path, c.template_path),
           {"experience",
            [](CampaignConfig& c, const toml::node& n) {
              c.experience = GetStrings(n, "llm.experience");
            }},
           {"mock_responses",
            [](CampaignConfig& c, const toml::node& n) {
              c.mock_responses = GetStrings(n, "llm.mock_responses");
            }},
       }},
      {"thresholds",
       {
           {"reward",
            [](CampaignConfig& c, const toml::node& n) {
              c.reward = Get<double>(n, "thresholds.reward");
            }},
           SCENFUZZ_FIELD(double, "thresholds", reward_fraction, c.reward_fraction),
           SCENFUZZ_FIELD(double, "thresholds", distance, c.distance),
           {"norm",
            [](CampaignConfig& c, const toml::node& n) {
              try {
                c.norm = ParseDistanceNorm(Get<std::string>(n, "thresholds.norm"));
              } catch (const Error& e) {
                throw ConfigError(e.what());
              }
            }},
       }},
  };
  return *setters;
}

#undef SCENFUZZ_FIELD

toml::table ParseToml(std::string_view text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid TOML: " << e.description() << " at line "
        << e.source().begin.line;
    throw ConfigError(msg.str());
  }
}

void ApplyOverride(toml::table& tbl, const std::string& override_text) {
  const auto eq = override_text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + override_text + "' is not key=value");
  }
  const std::string path(Trim(std::string_view(override_text).substr(0, eq)));
  const std::string raw(Trim(std::string_view(override_text).substr(eq + 1)));
  std::string section = "campaign";
  std::string key = path;
  if (const auto dot = path.find('.'); dot != std::string::npos) {
    section = path.substr(0, dot);
    key = path.substr(dot + 1);
  }
  if (section != "environment") {
    const auto& setters = Setters();
    auto it = setters.find(section);
    if (it == setters.end() || !it->second.count(key)) {
      throw ConfigError("unknown override key '" + path + "'");
    }
  }
  // Values are read as TOML literals; anything that is not one is a string.
  toml::table parsed;
  try {
    parsed = toml::parse("v = " + raw);
  } catch (const toml::parse_error&) {
    parsed.insert_or_assign("v", raw);
  }
  toml::table* target = tbl[section].as_table();
  if (!target) {
    tbl.insert_or_assign(section, toml::table{});
    target = tbl[section].as_table();
  }
  target->insert_or_assign(key, *parsed.get("v"));
}

CampaignConfig FromTable(const toml::table& tbl) {
  std::string env = CampaignConfig{}.environment;
  if (const toml::node* n = tbl.at_path("campaign.environment").node()) {
    env = Get<std::string>(*n, "campaign.environment");
  }
  CampaignConfig config = DefaultConfig(env);

  for (const auto& [section_key, section_node] : tbl) {
    const std::string section(section_key.str());
    const toml::table* section_table = section_node.as_table();
    if (!section_table) {
      throw ConfigError("top-level key '" + section + "' must be a [section]");
    }
    if (section == "environment") {
      for (const auto& [k, v] : *section_table) {
        config.env_params[std::string(k.str())] =
            Get<double>(v, "environment." + std::string(k.str()));
      }
      continue;
    }
    auto it = Setters().find(section);
    if (it == Setters().end()) {
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [k, v] : *section_table) {
      const std::string key(k.str());
      auto setter = it->second.find(key);
      if (setter == it->second.end()) {
        throw ConfigError("unknown key " + section + "." + key);
      }
      try {
        setter->second(config, v);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kConfig) throw;
        throw ConfigError(e.what());
      }
    }
  }
  ValidateConfig(config);
  return config;
}

std::string Quote(const std::string& s) {
  std::ostringstream out;
  out << toml::value<std::string>(s);
  return out.str();
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kLlmTester:
      return "llmtester";
    case Method::kLlmTesterNoMs:
      return "llmtester-no-ms";
    case Method::kMdpFuzz:
      return "mdpfuzz";
    case Method::kRandom:
      return "random";
  }
  return "?";
}

Method ParseMethod(std::string_view name) {
  for (Method m : {Method::kLlmTester, Method::kLlmTesterNoMs,
                   Method::kMdpFuzz, Method::kRandom}) {
    if (MethodName(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected llmtester, llmtester-no-ms, mdpfuzz, random)");
}

bool UsesLlm(Method method) {
  return method == Method::kLlmTester || method == Method::kLlmTesterNoMs;
}

std::string_view BackendKindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHeuristic:
      return "heuristic";
    case BackendKind::kMock:
      return "mock";
    case BackendKind::kHttp:
      return "http";
  }
  return "?";
}

BackendKind ParseBackendKind(std::string_view name) {
  for (BackendKind k :
       {BackendKind::kHeuristic, BackendKind::kMock, BackendKind::kHttp}) {
    if (BackendKindName(k) == name) return k;
  }
  throw ConfigError("unknown llm backend '" + std::string(name) +
                    "' (expected heuristic, mock, http)");
}

CampaignConfig DefaultConfig(const std::string& environment) {
  CampaignConfig c;
  c.environment = environment;
  if (environment == "coop-nav") {
    c.max_frames = 25;
    c.budget = 2000;
    c.generator.alpha = 20.0;
    c.generator.beta = 0.5;
    c.generator.delta = 0.1;
  } else {
    c.max_frames = 100;
    c.budget = 3000;
    c.generator.alpha = 25.0;
    c.generator.beta = 0.7;
    c.generator.delta = 0.1;
  }
  return c;
}

CampaignConfig ParseConfig(std::string_view toml_text,
                           const std::vector<std::string>& overrides) {
  toml::table tbl = ParseToml(toml_text);
  for (const std::string& o : overrides) ApplyOverride(tbl, o);
  return FromTable(tbl);
}

CampaignConfig LoadConfig(const std::string& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), overrides);
}

CampaignConfig WithOverrides(const CampaignConfig& config,
                             const std::vector<std::string>& overrides) {
  return ParseConfig(ConfigToToml(config), overrides);
}

std::string ConfigToToml(const CampaignConfig& c) {
  std::ostringstream out;
  auto num = [](double v) {
    std::string s = FormatDouble(v);
    // Keep floats recognisable as floats.
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  };
  auto strings = [](const std::vector<std::string>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += Quote(v[i]);
    }
    return s + "]";
  };
  out << "[campaign]\n"
      << "environment = " << Quote(c.environment) << "\n"
      << "method = " << Quote(std::string(MethodName(c.method))) << "\n"
      << "budget = " << c.budget << "\n"
      << "max_frames = " << c.max_frames << "\n"
      << "corpus_size = " << c.corpus_size << "\n"
      << "corpus_capacity = " << c.corpus_capacity << "\n"
      << "seed = " << c.seed << "\n"
      << "output_dir = " << Quote(c.output_dir) << "\n"
      << "checkpoint_every = " << c.checkpoint_every << "\n"
      << "diversity_intervals = " << c.diversity_intervals << "\n"
      << "freshness_intervals = " << c.freshness_intervals << "\n"
      << "sensitivity_amplitude = " << num(c.sensitivity_amplitude) << "\n"
      << "sensitivity_draws = " << c.sensitivity_draws << "\n"
      << "weight_floor = " << num(c.weight_floor) << "\n"
      << "failure_rate = "
      << Quote(c.failure_rate == FailureRateMode::kCumulative ? "cumulative"
                                                              : "windowed")
      << "\n"
      << "failure_rate_window = " << c.failure_rate_window << "\n"
      << "max_consecutive_skips = " << c.max_consecutive_skips << "\n\n";
  out << "[generator]\n"
      << "alpha = " << num(c.generator.alpha) << "\n"
      << "beta = " << num(c.generator.beta) << "\n"
      << "delta = " << num(c.generator.delta) << "\n"
      << "amplitude = " << num(c.generator.amplitude) << "\n\n";
  out << "[llm]\n"
      << "backend = " << Quote(std::string(BackendKindName(c.backend))) << "\n"
      << "base_url = " << Quote(c.base_url) << "\n"
      << "model = " << Quote(c.model) << "\n"
      << "temperature = " << num(c.temperature) << "\n"
      << "timeout_s = " << num(c.timeout_s) << "\n"
      << "max_retries = " << c.max_retries << "\n"
      << "parse_attempts = " << c.parse_attempts << "\n"
      << "transport_retries = " << c.transport_retries << "\n"
      << "feedback_cap = " << c.feedback_cap << "\n"
      << "template_path = " << Quote(c.template_path) << "\n"
      << "experience = " << strings(c.experience) << "\n"
      << "mock_responses = " << strings(c.mock_responses) << "\n\n";
  out << "[thresholds]\n";
  if (c.reward) out << "reward = " << num(*c.reward) << "\n";
  out << "reward_fraction = " << num(c.reward_fraction) << "\n"
      << "distance = " << num(c.distance) << "\n"
      << "norm = " << Quote(std::string(DistanceNormName(c.norm))) << "\n";
  if (!c.env_params.empty()) {
    out << "\n[environment]\n";
    for (const auto& [k, v] : c.env_params) out << k << " = " << num(v) << "\n";
  }
  return out.str();
}

void ValidateConfig(const CampaignConfig& c) {
  if (!EnvironmentRegistry::Global().Contains(c.environment)) {
    throw ConfigError("unknown environment '" + c.environment + "'");
  }
  if (c.budget < 1) throw ConfigError("campaign.budget must be >= 1");
  if (c.max_frames < 1) throw ConfigError("campaign.max_frames must be >= 1");
  if (c.corpus_size < 1) throw ConfigError("campaign.corpus_size must be >= 1");
  if (c.corpus_capacity < 0) {
    throw ConfigError("campaign.corpus_capacity must be >= 0");
  }
  if (c.corpus_capacity > 0 && c.corpus_capacity < c.corpus_size) {
    throw ConfigError("campaign.corpus_capacity must be >= corpus_size");
  }
  if (c.checkpoint_every < 1) {
    throw ConfigError("campaign.checkpoint_every must be >= 1");
  }
  if (c.diversity_intervals < 1 || c.freshness_intervals < 1) {
    throw ConfigError("grid intervals must be >= 1");
  }
  if (!(c.sensitivity_amplitude > 0.0)) {
    throw ConfigError("campaign.sensitivity_amplitude must be positive");
  }
  if (c.sensitivity_draws < 1) {
    throw ConfigError("campaign.sensitivity_draws must be >= 1");
  }
  if (!(c.weight_floor >= 0.0)) {
    throw ConfigError("campaign.weight_floor must be >= 0");
  }
  if (c.failure_rate_window < 1) {
    throw ConfigError("campaign.failure_rate_window must be >= 1");
  }
  if (c.max_consecutive_skips < 1) {
    throw ConfigError("campaign.max_consecutive_skips must be >= 1");
  }
  try {
    GeneratorState check(c.generator);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (c.parse_attempts < 1) throw ConfigError("llm.parse_attempts must be >= 1");
  if (c.transport_retries < 0 || c.max_retries < 0) {
    throw ConfigError("llm retry counts must be >= 0");
  }
  if (c.feedback_cap < 1) throw ConfigError("llm.feedback_cap must be >= 1");
  if (!(c.timeout_s > 0.0)) throw ConfigError("llm.timeout_s must be positive");
  if (UsesLlm(c.method) && c.backend == BackendKind::kMock &&
      c.mock_responses.empty()) {
    throw ConfigError("llm.backend = mock needs llm.mock_responses");
  }
  if (c.reward && !(*c.reward > 0.0)) {
    throw ConfigError("thresholds.reward must be positive");
  }
  if (!(c.reward_fraction > 0.0)) {
    throw ConfigError("thresholds.reward_fraction must be positive");
  }
  if (!(c.distance > 0.0)) throw ConfigError("thresholds.distance must be positive");
  // Surfaces unknown [environment] keys early.
  try {
    EnvironmentRegistry::Global().Create(c.environment, c.env_params);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace scenfuzz
