// Command-line front end: run, replay, report, compare, validate-template.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scenfuzz/campaign.h"
#include "scenfuzz/config.h"
#include "scenfuzz/error.h"
#include "scenfuzz/prompt.h"
#include "scenfuzz/text.h"

namespace fs = std::filesystem;
using namespace scenfuzz;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitDivergence = 4;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kExitConfig;
    case ErrorCode::kBackendUnreachable:
      return kExitBackend;
    case ErrorCode::kReplayDivergence:
      return kExitDivergence;
    default:
      return kExitOther;
  }
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CampaignConfig LoadWithBackend(const std::string& path,
                               std::vector<std::string> overrides,
                               const std::string& backend) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kConfig, "config file not found: " + path);
  }
  if (!backend.empty()) overrides.push_back("llm.backend=\"" + backend + "\"");
  return LoadConfig(path, overrides);
}

void PrintSummary(const CampaignReport& r, int verbosity) {
  std::cout << MethodName(r.method) << " on " << r.environment << ": "
            << r.failures << " failures in " << r.tests_run
            << " tests (rate " << FormatDouble(r.failure_rate) << ")\n";
  if (r.diversity) {
    std::cout << "diversity #initial=" << r.diversity->n_initial
              << " #terminal=" << r.diversity->n_terminal
              << " #entire=" << r.diversity->n_entire << "\n";
  }
  std::cout << "llm calls " << r.llm_calls << ", random calls "
            << r.random_calls << ", skipped " << r.skipped << "\n";
  if (verbosity > 0) {
    std::cout << "alpha updates " << r.alpha_updates << ", corpus additions "
              << r.added << ", discarded " << r.discarded << ", reseeds "
              << r.reseeds << ", wall clock " << FormatDouble(r.wall_clock_s)
              << " s\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search-based scenario testing for decision-making policies"};
  app.require_subcommand(1);
  app.fallthrough();
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "More output (repeatable)");

  std::string config_path;
  std::vector<std::string> overrides;
  std::string backend;

  auto* run = app.add_subcommand("run", "Run one test campaign");
  run->add_option("-c,--config", config_path, "Campaign TOML file")->required();
  run->add_option("-o,--override", overrides, "section.key=value (repeatable)");
  run->add_option("--backend", backend, "LLM backend")
      ->check(CLI::IsMember({"heuristic", "mock", "http"}));

  std::string dir;
  int64_t failure_index = 0;
  bool trace = false;
  auto* replay = app.add_subcommand("replay", "Re-run a recorded failure");
  replay->add_option("-d,--dir", dir, "Campaign output directory")->required();
  replay->add_option("-f,--failure", failure_index, "Failure index")->required();
  replay->add_flag("--trace", trace, "Print every frame");

  auto* report = app.add_subcommand(
      "report", "Recompute failure and diversity tables from an output directory");
  report->add_option("-d,--dir", dir, "Campaign output directory")->required();

  std::vector<std::string> methods{"random", "mdpfuzz", "llmtester"};
  auto* compare = app.add_subcommand("compare", "Run several methods side by side");
  compare->add_option("-c,--config", config_path, "Campaign TOML file")
      ->required();
  compare->add_option("-o,--override", overrides, "section.key=value");
  compare->add_option("--backend", backend, "LLM backend")
      ->check(CLI::IsMember({"heuristic", "mock", "http"}));
  compare->add_option("-m,--methods", methods, "Methods to compare")
      ->delimiter(',');

  std::string template_path;
  std::string env_name;
  auto* validate = app.add_subcommand(
      "validate-template", "Check a prompt template against an environment");
  validate->add_option("-t,--template", template_path, "Template file")
      ->required();
  validate->add_option("-e,--environment", env_name, "Environment name")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      const CampaignConfig config =
          LoadWithBackend(config_path, overrides, backend);
      const CampaignReport r = RunCampaign(config);
      PrintSummary(r, verbosity);
      if (!config.output_dir.empty()) {
        std::cout << "artifacts in " << config.output_dir << "\n";
      }
      return 0;
    }

    if (*replay) {
      const CampaignConfig config =
          ParseConfig(ReadText((fs::path(dir) / "config.snapshot").string()));
      const auto records =
          LoadFailureRecords((fs::path(dir) / "failures.jsonl").string());
      if (failure_index < 0 ||
          failure_index >= static_cast<int64_t>(records.size())) {
        std::cerr << "error: failure index " << failure_index
                  << " out of range (" << records.size() << " records)\n";
        return kExitOther;
      }
      const FailureRecord& rec = records[failure_index];
      auto env = EnvironmentRegistry::Global().Create(config.environment,
                                                      config.env_params);
      const Trajectory traj = ReplayFailure(rec, *env, config.max_frames);
      std::cout << "failure #" << rec.index << " (" << rec.failure_kind
                << ") reproduced at frame " << rec.frames << "\n";
      if (trace) {
        for (const EnvState& s : traj) {
          std::cout << s.frame << " " << FormatVector(s.observation) << "\n";
        }
      }
      return 0;
    }

    if (*report) {
      const CampaignReport r = RecomputeReport(dir);
      const std::string recomputed = RenderResults(r);
      std::cout << recomputed;
      const fs::path md = fs::path(dir) / "report.md";
      if (fs::exists(md)) {
        const std::string stored = ExtractResultsSection(ReadText(md.string()));
        if (ExtractResultsSection(recomputed) != stored) {
          std::cerr << "warning: recomputed results differ from report.md\n";
          return kExitOther;
        }
        if (verbosity > 0) std::cout << "\nmatches report.md\n";
      }
      return 0;
    }

    if (*compare) {
      const CampaignConfig base =
          LoadWithBackend(config_path, overrides, backend);
      std::vector<CampaignConfig> configs;
      for (const std::string& m : methods) {
        CampaignConfig c = base;
        c.method = ParseMethod(m);
        if (!base.output_dir.empty()) {
          c.output_dir = (fs::path(base.output_dir) / m).string();
        }
        configs.push_back(c);
      }
      const Comparison cmp = CompareMethods(configs);
      std::cout << RenderComparison(cmp);
      return 0;
    }

    if (*validate) {
      auto env = EnvironmentRegistry::Global().Create(env_name);
      const PromptTemplate tmpl = LoadPromptTemplate(template_path);
      const auto problems = CheckTemplate(tmpl, env->space());
      if (problems.empty()) {
        std::cout << "template OK for " << env_name << "\n";
        return 0;
      }
      for (const std::string& p : problems) std::cout << "problem: " << p << "\n";
      return kExitConfig;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
