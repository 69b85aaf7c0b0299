#include "scenfuzz/campaign.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "scenfuzz/corpus.h"
#include "scenfuzz/error.h"
#include "scenfuzz/generator.h"
#include "scenfuzz/llm_mutator.h"
#include "scenfuzz/prompt.h"
#include "scenfuzz/text.h"

namespace scenfuzz {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kMutationRedraws = 16;
constexpr double kNoAlpha = std::numeric_limits<double>::quiet_NaN();

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string AlphaCell(double alpha) {
  return std::isnan(alpha) ? std::string() : FormatDouble(alpha);
}

std::string CorpusLine(const CorpusEntry& e, int64_t iteration) {
  json j = {{"schema_version", kSchemaVersion},
            {"checkpoint_iteration", iteration},
            {"id", e.scenario.id},
            {"parent", e.scenario.parent ? json(*e.scenario.parent) : json()},
            {"origin", OriginName(e.scenario.origin)},
            {"params", e.scenario.params},
            {"r_seed", e.r_seed},
            {"sensitivity", e.sensitivity},
            {"potential", e.potential},
            {"added_at", e.added_at}};
  return j.dump();
}

PromptTemplate ResolveTemplate(const CampaignConfig& config,
                               const ScenarioSpace& space) {
  PromptTemplate tmpl;
  if (!config.template_path.empty()) {
    tmpl = LoadPromptTemplate(config.template_path);
  } else if (auto text = BuiltinTemplateText(config.environment)) {
    tmpl = ParsePromptTemplate(*text);
  } else {
    throw Error(ErrorCode::kConfig, "no prompt template for environment '" +
                                        config.environment +
                                        "'; set llm.template_path");
  }
  std::vector<std::string> problems = CheckTemplate(tmpl, space);
  if (!problems.empty()) {
    throw Error(ErrorCode::kConfig, "prompt template: " + problems.front());
  }
  return tmpl;
}

// Everything the loop mutates, in one place.
class CampaignRun {
 public:
  CampaignRun(const CampaignConfig& config, LlmBackend* backend)
      : config_(config),
        env_(EnvironmentRegistry::Global().Create(config.environment,
                                                  config.env_params)),
        rng_(config.seed),
        generator_(config.generator),
        feedback_(static_cast<size_t>(config.feedback_cap)) {
    experience_.plans = config.experience;
    init_options_.max_frames = config.max_frames;
    init_options_.freshness_intervals = config.freshness_intervals;
    init_options_.sensitivity.amplitude = config.sensitivity_amplitude;
    init_options_.sensitivity.draws = config.sensitivity_draws;
    init_options_.sensitivity.max_frames = config.max_frames;
    weighting_.relative_floor = config.weight_floor;
    freshness_grid_.emplace(FreshnessGrid(*env_, config.freshness_intervals));

    if (UsesLlm(config.method)) {
      if (backend == nullptr) {
        owned_backend_ = MakeBackend(config);
        backend = owned_backend_.get();
      }
      LlmMutatorOptions options;
      options.parse_attempts = config.parse_attempts;
      options.transport_retries = config.transport_retries;
      options.temperature = config.temperature;
      mutator_.emplace(*backend, ResolveTemplate(config, env_->space()),
                       env_->space(), env_->constraint_hook(), options);
    }

    report_.environment = config.environment;
    report_.method = config.method;
    report_.seed = config.seed;
    report_.budget = config.budget;
    report_.diversity_intervals = config.diversity_intervals;
  }

  CampaignReport Run() {
    const auto start = std::chrono::steady_clock::now();
    OpenOutputs();
    if (config_.method != Method::kRandom) InitCorpus();

    int consecutive_skips = 0;
    while (tracker_.tests_run() < config_.budget) {
      const bool tested = config_.method == Method::kRandom ? RandomIteration()
                                                            : CorpusIteration();
      if (tested) {
        consecutive_skips = 0;
        if (tracker_.tests_run() % config_.checkpoint_every == 0) {
          Checkpoint();
        }
      } else if (++consecutive_skips >= config_.max_consecutive_skips) {
        throw Error(ErrorCode::kGeneration,
                    "aborting: " + std::to_string(consecutive_skips) +
                        " generations in a row produced no testable scenario");
      }
    }
    if (tracker_.tests_run() % config_.checkpoint_every != 0) Checkpoint();

    Finish();
    report_.wall_clock_s = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    WriteReport();
    return std::move(report_);
  }

 private:
  bool writing() const { return !config_.output_dir.empty(); }

  void OpenOutputs() {
    if (!writing()) return;
    const fs::path dir(config_.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
    OpenOut(dir / "config.snapshot") << ConfigToToml(config_);
    failures_out_ = OpenOut(dir / "failures.jsonl");
    corpus_out_ = OpenOut(dir / "corpus.jsonl");
    metrics_out_ = OpenOut(dir / "metrics.csv");
    metrics_out_ << "iteration,cumulative_failures,failure_rate,alpha,origin\n";
    if (mutator_) llm_log_ = OpenOut(dir / "llm_log.jsonl");
  }

  void InitCorpus() {
    std::optional<size_t> capacity;
    if (config_.corpus_capacity > 0) {
      capacity = static_cast<size_t>(config_.corpus_capacity);
    }
    corpus_ = InitRandomCorpus(*env_, config_.corpus_size, rng_, ids_,
                               init_options_, capacity);
    if (!reward_threshold_) {
      if (config_.reward) {
        reward_threshold_ = *config_.reward;
      } else {
        double lo = corpus_.entries().front().r_seed;
        double hi = lo;
        for (const CorpusEntry& e : corpus_.entries()) {
          lo = std::min(lo, e.r_seed);
          hi = std::max(hi, e.r_seed);
        }
        const double range = hi - lo;
        reward_threshold_ = config_.reward_fraction * (range > 0 ? range : 1.0);
      }
      report_.reward_threshold = *reward_threshold_;
    }
  }

  // Uniform baseline: fresh scenarios, no corpus.
  bool RandomIteration() {
    Scenario s;
    s.id = ids_.Next();
    s.origin = Origin::kInitialSample;
    s.params = SampleValidParams(env_->space(), env_->constraint_hook(), rng_,
                                 init_options_.retry_budget);
    const EpisodeResult result = RunEpisode(*env_, s, config_.max_frames);
    RecordTest(s, result, kNoAlpha);
    if (!result.failed) ++report_.discarded;
    return true;
  }

  bool CorpusIteration() {
    if (corpus_.empty()) {
      ++report_.reseeds;
      InitCorpus();
    }
    const CorpusEntry seed = corpus_.SampleSeed(rng_, weighting_);
    const double alpha_at_generation =
        config_.method == Method::kLlmTester ? generator_.alpha() : kNoAlpha;

    std::optional<Scenario> scenario;
    switch (config_.method) {
      case Method::kLlmTester: {
        const std::vector<double> potentials = corpus_.Potentials();
        if (ClassifyPotential(seed.potential, potentials, generator_.alpha()) ==
            PotentialClass::kLow) {
          generator_.CountLlmDispatch();
          scenario = LlmGenerate(seed);
        } else {
          generator_.CountRandomDispatch();
          scenario = RandomGenerate(seed);
        }
        break;
      }
      case Method::kLlmTesterNoMs:
        generator_.CountLlmDispatch();
        scenario = LlmGenerate(seed);
        break;
      case Method::kMdpFuzz:
        generator_.CountRandomDispatch();
        scenario = RandomGenerate(seed);
        break;
      case Method::kRandom:
        break;
    }
    if (!scenario) {
      ++report_.skipped;
      return false;
    }

    const EpisodeResult result = RunEpisode(*env_, *scenario, config_.max_frames);
    if (scenario->origin == Origin::kLlmMutation) {
      GenerationOutcome outcome;
      outcome.new_params = scenario->params;
      outcome.r_new = result.cumulative_reward;
      BadCaseThresholds thresholds;
      thresholds.reward = *reward_threshold_;
      thresholds.distance = config_.distance;
      thresholds.norm = config_.norm;
      if (auto bad = ClassifyBadCase(env_->space(), seed.scenario.params,
                                     seed.r_seed, outcome, thresholds)) {
        feedback_.Add(std::move(*bad));
      }
    }

    RecordTest(*scenario, result, alpha_at_generation);
    const CellIndex terminal_cell =
        CellIndexOf(result.trajectory.back().observation, *freshness_grid_);
    const UpdateOutcome update = corpus_.UpdateAfterTest(
        seed, *scenario, result, terminal_cell, tracker_.tests_run(), [&] {
          return ComputeSensitivity(*env_, *scenario, init_options_.sensitivity,
                                    rng_, result.cumulative_reward);
        });
    if (update == UpdateOutcome::kAddedNew) ++report_.added;
    if (update == UpdateOutcome::kDiscarded) ++report_.discarded;

    if (result.failed && config_.method == Method::kLlmTester) {
      const double rate =
          config_.failure_rate == FailureRateMode::kCumulative
              ? tracker_.FailureRate()
              : tracker_.WindowedFailureRate(config_.failure_rate_window);
      generator_.UpdateAlpha(rate);
      ++report_.alpha_updates;
      report_.alpha_trace.push_back(generator_.alpha());
    }
    return true;
  }

  std::optional<Scenario> RandomGenerate(const CorpusEntry& seed) {
    const ConstraintHook hook = env_->constraint_hook();
    for (int attempt = 0; attempt < kMutationRedraws; ++attempt) {
      Scenario s = RandomMutation(env_->space(), seed.scenario,
                                  generator_.amplitude(), rng_, ids_.peek());
      if (Validate(env_->space(), s.params, hook)) {
        ids_.Next();
        return s;
      }
    }
    return std::nullopt;
  }

  std::optional<Scenario> LlmGenerate(const CorpusEntry& seed) {
    const int64_t requests_before = mutator_->stats().requests;
    std::optional<Scenario> out;
    std::string error;
    try {
      out = mutator_->Mutate(seed, feedback_, experience_, ids_.peek());
      ids_.Next();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kGeneration) throw;
      error = e.what();
    }
    if (llm_log_.is_open()) {
      json j = {{"schema_version", kSchemaVersion},
                {"test_index", tracker_.tests_run() + 1},
                {"seed_id", seed.scenario.id},
                {"requests", mutator_->stats().requests - requests_before},
                {"ok", out.has_value()},
                {"response", mutator_->stats().last_response}};
      if (!error.empty()) j["error"] = error;
      llm_log_ << j.dump() << "\n";
    }
    return out;
  }

  void RecordTest(const Scenario& s, const EpisodeResult& result,
                  double alpha) {
    tracker_.Record(result.failed, s.origin, alpha);
    const int64_t iteration = tracker_.tests_run();
    if (result.failed) {
      FailureRecord rec;
      rec.index = static_cast<int64_t>(report_.failure_records.size());
      rec.iteration = iteration;
      rec.id = s.id;
      rec.parent = s.parent;
      rec.origin = s.origin;
      rec.params = s.params;
      rec.frames = result.frames;
      rec.failure_kind = result.failure_kind.value_or("failure");
      rec.reward = result.cumulative_reward;
      if (writing()) failures_out_ << FailureRecordToJson(rec) << "\n";
      report_.failure_records.push_back(std::move(rec));
    }
    report_.cumulative_failures.push_back(tracker_.failures_found());
    report_.failure_rate_series.push_back(tracker_.FailureRate());
    report_.alpha_series.push_back(alpha);
    report_.origins.push_back(s.origin);
    if (writing()) {
      metrics_out_ << iteration << "," << tracker_.failures_found() << ","
                   << FormatDouble(tracker_.FailureRate()) << ","
                   << AlphaCell(alpha) << "," << OriginName(s.origin) << "\n";
    }
  }

  void Checkpoint() {
    if (!writing() || config_.method == Method::kRandom) return;
    for (const CorpusEntry& e : corpus_.entries()) {
      corpus_out_ << CorpusLine(e, tracker_.tests_run()) << "\n";
    }
  }

  void Finish() {
    report_.tests_run = tracker_.tests_run();
    report_.failures = tracker_.failures_found();
    report_.failure_rate = tracker_.FailureRate();
    report_.llm_calls = generator_.llm_calls();
    report_.random_calls = generator_.random_calls();
    report_.llm_requests = mutator_ ? mutator_->stats().requests : 0;
    report_.final_alpha =
        config_.method == Method::kLlmTester ? generator_.alpha() : kNoAlpha;
    report_.bad_invalidity = feedback_.count(BadCaseCategory::kInvalidity);
    report_.bad_excessive =
        feedback_.count(BadCaseCategory::kExcessiveModification);
    report_.bad_insufficient =
        feedback_.count(BadCaseCategory::kInsufficientChallenge);
    if (config_.method == Method::kRandom) {
      report_.random_calls = report_.tests_run;
    }

    std::vector<Trajectory> trajectories;
    trajectories.reserve(report_.failure_records.size());
    for (const FailureRecord& rec : report_.failure_records) {
      trajectories.push_back(ReplayFailure(rec, *env_, config_.max_frames));
    }
    if (!trajectories.empty()) {
      report_.diversity =
          ComputeDiversityCounts(trajectories, config_.diversity_intervals);
    }
  }

  void WriteReport() {
    if (!writing()) return;
    failures_out_.close();
    corpus_out_.close();
    metrics_out_.close();
    if (llm_log_.is_open()) llm_log_.close();
    OpenOut(fs::path(config_.output_dir) / "report.md")
        << RenderReportMarkdown(report_, config_);
  }

  const CampaignConfig& config_;
  std::unique_ptr<Environment> env_;
  Rng rng_;
  IdSource ids_;
  GeneratorState generator_;
  FeedbackLedger feedback_;
  ExpertExperience experience_;
  CorpusInitOptions init_options_;
  SeedWeighting weighting_;
  std::optional<DiversityGrid> freshness_grid_;
  std::unique_ptr<LlmBackend> owned_backend_;
  std::optional<LlmMutator> mutator_;
  Corpus corpus_;
  MetricsTracker tracker_;
  std::optional<double> reward_threshold_;
  CampaignReport report_;

  std::ofstream failures_out_;
  std::ofstream corpus_out_;
  std::ofstream metrics_out_;
  std::ofstream llm_log_;
};

std::string DiversityCell(const std::optional<DiversityCounts>& d,
                          int64_t DiversityCounts::*field) {
  return d ? std::to_string((*d).*field) : std::string("-");
}

}  // namespace

std::string FailureRecordToJson(const FailureRecord& r) {
  json j = {{"schema_version", kSchemaVersion},
            {"index", r.index},
            {"iteration", r.iteration},
            {"id", r.id},
            {"parent", r.parent ? json(*r.parent) : json()},
            {"origin", OriginName(r.origin)},
            {"params", r.params},
            {"frames", r.frames},
            {"failure_kind", r.failure_kind},
            {"reward", r.reward}};
  return j.dump();
}

FailureRecord ParseFailureRecord(std::string_view line) {
  try {
    const json j = json::parse(line);
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorCode::kIo, "unsupported schema_version in failure record");
    }
    FailureRecord r;
    r.index = j.at("index").get<int64_t>();
    r.iteration = j.at("iteration").get<int64_t>();
    r.id = j.at("id").get<ScenarioId>();
    if (!j.at("parent").is_null()) r.parent = j.at("parent").get<ScenarioId>();
    r.origin = ParseOrigin(j.at("origin").get<std::string>());
    r.params = j.at("params").get<std::vector<double>>();
    r.frames = j.at("frames").get<int>();
    r.failure_kind = j.at("failure_kind").get<std::string>();
    r.reward = j.at("reward").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("bad failure record: ") + e.what());
  }
}

std::vector<FailureRecord> LoadFailureRecords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::vector<FailureRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!Trim(line).empty()) out.push_back(ParseFailureRecord(line));
  }
  return out;
}

std::unique_ptr<LlmBackend> MakeBackend(const CampaignConfig& config) {
  switch (config.backend) {
    case BackendKind::kHeuristic:
      return std::make_unique<HeuristicBackend>(config.environment);
    case BackendKind::kMock:
      return std::make_unique<MockBackend>(config.mock_responses);
    case BackendKind::kHttp: {
      HttpBackendOptions options;
      options.base_url = config.base_url;
      options.model = config.model;
      if (const char* key = std::getenv("SCENFUZZ_API_KEY")) {
        options.api_key = key;
      }
      options.timeout = std::chrono::milliseconds(
          static_cast<int64_t>(config.timeout_s * 1000.0));
      options.max_retries = config.max_retries;
      return std::make_unique<HttpBackend>(std::move(options));
    }
  }
  throw Error(ErrorCode::kConfig, "unknown backend");
}

CampaignReport RunCampaign(const CampaignConfig& config, LlmBackend* backend) {
  ValidateConfig(config);
  CampaignRun run(config, backend);
  return run.Run();
}

Trajectory ReplayFailure(const FailureRecord& record, Environment& env,
                         int max_frames) {
  const ValidationResult valid =
      Validate(env.space(), record.params, env.constraint_hook());
  if (!valid) {
    throw Error(ErrorCode::kReplayDivergence,
                "failure #" + std::to_string(record.index) +
                    " is not a valid scenario: " + valid.reason());
  }
  EpisodeResult result = RunEpisode(env, record.params, max_frames);
  if (!result.failed || result.frames != record.frames ||
      result.failure_kind.value_or("") != record.failure_kind) {
    std::ostringstream msg;
    msg << "replay of failure #" << record.index << " diverged: recorded "
        << record.failure_kind << " at frame " << record.frames << ", got "
        << (result.failed ? result.failure_kind.value_or("failure")
                          : std::string("no failure"))
        << " at frame " << result.frames;
    throw Error(ErrorCode::kReplayDivergence, msg.str());
  }
  return std::move(result.trajectory);
}

std::string RenderResults(const CampaignReport& r) {
  std::ostringstream out;
  out << "## Results\n\n"
      << "| metric | value |\n|---|---|\n"
      << "| environment | " << r.environment << " |\n"
      << "| method | " << MethodName(r.method) << " |\n"
      << "| seed | " << r.seed << " |\n"
      << "| tests | " << r.tests_run << " |\n"
      << "| failures | " << r.failures << " |\n"
      << "| failure rate | " << FormatDouble(r.failure_rate) << " |\n";
  out << "\n### Diversity (N = " << r.diversity_intervals << ")\n\n"
      << "| #Initial | #Terminal | #Entire |\n|---|---|---|\n"
      << "| " << DiversityCell(r.diversity, &DiversityCounts::n_initial)
      << " | " << DiversityCell(r.diversity, &DiversityCounts::n_terminal)
      << " | " << DiversityCell(r.diversity, &DiversityCounts::n_entire)
      << " |\n\n"
      << "### Failures by origin\n\n| origin | failures |\n|---|---|\n";
  for (Origin o :
       {Origin::kInitialSample, Origin::kRandomMutation, Origin::kLlmMutation}) {
    int64_t n = 0;
    for (const FailureRecord& f : r.failure_records) n += f.origin == o;
    out << "| " << OriginName(o) << " | " << n << " |\n";
  }
  out << "\n### Cumulative failures\n\n| iteration | failures |\n|---|---|\n";
  const int64_t step = std::max<int64_t>(1, r.tests_run / 10);
  for (int64_t i = step; i <= r.tests_run; i += step) {
    out << "| " << i << " | " << r.cumulative_failures[i - 1] << " |\n";
  }
  if (r.tests_run % step != 0) {
    out << "| " << r.tests_run << " | " << r.failures << " |\n";
  }
  return out.str();
}

std::string RenderReportMarkdown(const CampaignReport& r,
                                 const CampaignConfig& config) {
  std::ostringstream out;
  out << "# Campaign report\n\n" << RenderResults(r) << "\n## Generation\n\n"
      << "| counter | value |\n|---|---|\n"
      << "| llm calls | " << r.llm_calls << " |\n"
      << "| llm requests | " << r.llm_requests << " |\n"
      << "| random calls | " << r.random_calls << " |\n"
      << "| alpha updates | " << r.alpha_updates << " |\n"
      << "| final alpha | " << AlphaCell(r.final_alpha) << " |\n"
      << "| corpus additions | " << r.added << " |\n"
      << "| discarded | " << r.discarded << " |\n"
      << "| skipped generations | " << r.skipped << " |\n"
      << "| corpus reseeds | " << r.reseeds << " |\n"
      << "| bad cases: Invalidity | " << r.bad_invalidity << " |\n"
      << "| bad cases: ExcessiveModification | " << r.bad_excessive << " |\n"
      << "| bad cases: InsufficientChallenge | " << r.bad_insufficient
      << " |\n"
      << "| reward threshold | " << FormatDouble(r.reward_threshold) << " |\n"
      << "\n## Settings\n\n"
      << "budget " << config.budget << ", max frames " << config.max_frames
      << ", corpus " << config.corpus_size << ", alpha "
      << FormatDouble(config.generator.alpha) << ", beta "
      << FormatDouble(config.generator.beta) << ", delta "
      << FormatDouble(config.generator.delta) << ", amplitude "
      << FormatDouble(config.generator.amplitude) << "\n\n"
      << "Wall clock: " << FormatDouble(std::round(r.wall_clock_s * 1000) / 1000)
      << " s\n";
  return out.str();
}

std::string ExtractResultsSection(std::string_view md) {
  const size_t begin = md.find("## Results");
  if (begin == std::string_view::npos) return {};
  size_t end = md.find("\n## ", begin + 1);
  if (end == std::string_view::npos) end = md.size();
  return std::string(md.substr(begin, end - begin));
}

CampaignReport RecomputeReport(const std::string& output_dir) {
  const fs::path dir(output_dir);
  const CampaignConfig config =
      ParseConfig(ReadFile(dir / "config.snapshot"));
  CampaignReport r;
  r.environment = config.environment;
  r.method = config.method;
  r.seed = config.seed;
  r.budget = config.budget;
  r.diversity_intervals = config.diversity_intervals;
  r.failure_records = LoadFailureRecords((dir / "failures.jsonl").string());

  std::istringstream metrics(ReadFile(dir / "metrics.csv"));
  std::string line;
  std::getline(metrics, line);  // header
  while (std::getline(metrics, line)) {
    if (Trim(line).empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 5) {
      throw Error(ErrorCode::kIo, "bad metrics.csv line: " + line);
    }
    // Origin is the last column; alpha may be empty.
    const auto failures = ParseDouble(cols[1]);
    const auto rate = ParseDouble(cols[2]);
    if (!failures || !rate) {
      throw Error(ErrorCode::kIo, "bad metrics.csv line: " + line);
    }
    r.cumulative_failures.push_back(static_cast<int64_t>(*failures));
    r.failure_rate_series.push_back(*rate);
    r.alpha_series.push_back(ParseDouble(cols[3]).value_or(kNoAlpha));
    r.origins.push_back(ParseOrigin(cols[4]));
  }
  r.tests_run = static_cast<int64_t>(r.cumulative_failures.size());
  r.failures = r.tests_run ? r.cumulative_failures.back() : 0;
  r.failure_rate = r.tests_run ? r.failure_rate_series.back() : 0.0;
  if (r.failures != static_cast<int64_t>(r.failure_records.size())) {
    throw Error(ErrorCode::kIo,
                "metrics.csv and failures.jsonl disagree on the failure count");
  }

  auto env = EnvironmentRegistry::Global().Create(config.environment,
                                                  config.env_params);
  std::vector<Trajectory> trajectories;
  for (const FailureRecord& rec : r.failure_records) {
    trajectories.push_back(ReplayFailure(rec, *env, config.max_frames));
  }
  if (!trajectories.empty()) {
    r.diversity = ComputeDiversityCounts(trajectories, config.diversity_intervals);
  }
  r.final_alpha = kNoAlpha;
  return r;
}

Comparison CompareMethods(const std::vector<CampaignConfig>& configs,
                          LlmBackend* backend) {
  if (configs.empty()) throw Error(ErrorCode::kConfig, "nothing to compare");
  const CampaignConfig& first = configs.front();
  for (const CampaignConfig& c : configs) {
    if (c.environment != first.environment) {
      throw Error(ErrorCode::kConfig, "compare: mismatched environments (" +
                                          first.environment + " vs " +
                                          c.environment + ")");
    }
    if (c.budget != first.budget || c.seed != first.seed) {
      throw Error(ErrorCode::kConfig,
                  "compare: every method needs the same budget and seed");
    }
  }
  Comparison cmp;
  for (const CampaignConfig& c : configs) {
    CampaignReport r = RunCampaign(c, backend);
    ComparisonRow row;
    row.method = r.method;
    row.tests_run = r.tests_run;
    row.failures = r.failures;
    row.failure_rate = r.failure_rate;
    row.diversity = r.diversity;
    row.llm_calls = r.llm_calls;
    row.random_calls = r.random_calls;
    cmp.rows.push_back(row);
    cmp.reports.push_back(std::move(r));
  }
  const ComparisonRow* ms = nullptr;
  const ComparisonRow* no_ms = nullptr;
  for (const ComparisonRow& row : cmp.rows) {
    if (row.method == Method::kLlmTester) ms = &row;
    if (row.method == Method::kLlmTesterNoMs) no_ms = &row;
  }
  if (ms && no_ms) {
    cmp.assertions.push_back(
        "llm_calls(llmtester) = " + std::to_string(ms->llm_calls) +
        " < llm_calls(llmtester-no-ms) = " + std::to_string(no_ms->llm_calls) +
        ": " + (ms->llm_calls < no_ms->llm_calls ? "holds" : "VIOLATED"));
  }
  return cmp;
}

std::string RenderComparison(const Comparison& cmp) {
  std::ostringstream out;
  out << "| method | tests | failures | failure rate | #Initial | #Terminal | "
         "#Entire | llm calls | random calls |\n"
      << "|---|---|---|---|---|---|---|---|---|\n";
  for (const ComparisonRow& row : cmp.rows) {
    out << "| " << MethodName(row.method) << " | " << row.tests_run << " | "
        << row.failures << " | " << FormatDouble(row.failure_rate) << " | "
        << DiversityCell(row.diversity, &DiversityCounts::n_initial) << " | "
        << DiversityCell(row.diversity, &DiversityCounts::n_terminal) << " | "
        << DiversityCell(row.diversity, &DiversityCounts::n_entire) << " | "
        << row.llm_calls << " | " << row.random_calls << " |\n";
  }
  for (const std::string& a : cmp.assertions) out << "\n" << a << "\n";
  return out.str();
}

}  // namespace scenfuzz
