// Python bindings for the core library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scenfuzz/campaign.h"
#include "scenfuzz/config.h"
#include "scenfuzz/corpus.h"
#include "scenfuzz/environment.h"
#include "scenfuzz/error.h"
#include "scenfuzz/evaluation.h"
#include "scenfuzz/generator.h"
#include "scenfuzz/prompt.h"

namespace py = pybind11;
using namespace scenfuzz;

namespace {

py::dict EpisodeToDict(const EpisodeResult& r) {
  py::dict d;
  d["failed"] = r.failed;
  d["failure_kind"] = r.failure_kind ? py::cast(*r.failure_kind) : py::none();
  d["frames"] = r.frames;
  d["reward"] = r.cumulative_reward;
  py::list traj;
  for (const EnvState& s : r.trajectory) traj.append(py::cast(s.observation));
  d["trajectory"] = traj;
  return d;
}

py::dict ReportToDict(const CampaignReport& r) {
  py::dict d;
  d["environment"] = r.environment;
  d["method"] = std::string(MethodName(r.method));
  d["seed"] = r.seed;
  d["tests_run"] = r.tests_run;
  d["failures"] = r.failures;
  d["failure_rate"] = r.failure_rate;
  d["cumulative_failures"] = r.cumulative_failures;
  d["llm_calls"] = r.llm_calls;
  d["random_calls"] = r.random_calls;
  d["alpha_trace"] = r.alpha_trace;
  d["final_alpha"] = std::isnan(r.final_alpha) ? py::none() : py::cast(r.final_alpha);
  d["skipped"] = r.skipped;
  if (r.diversity) {
    d["diversity"] = py::make_tuple(r.diversity->n_initial,
                                    r.diversity->n_terminal,
                                    r.diversity->n_entire);
  } else {
    d["diversity"] = py::none();
  }
  d["results_markdown"] = RenderResults(r);
  return d;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

PYBIND11_MODULE(_scenfuzz, m) {
  m.doc() = "Scenario fuzzing core: environments, dispatch math, campaigns";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("environments", [] { return EnvironmentRegistry::Global().Names(); },
        "Registered environment names.");

  m.def(
      "run_episode",
      [](const std::string& env_name, const std::vector<double>& params,
         std::optional<int> max_frames, const EnvParams& env_params) {
        auto env = EnvironmentRegistry::Global().Create(env_name, env_params);
        return EpisodeToDict(RunEpisode(
            *env, params, max_frames.value_or(env->default_max_frames())));
      },
      py::arg("environment"), py::arg("params"), py::arg("max_frames") = py::none(),
      py::arg("env_params") = EnvParams{},
      "Roll out one scenario and return failure flag, frames, reward and the "
      "observation trajectory.");

  m.def("space", [](const std::string& env_name) {
    auto env = EnvironmentRegistry::Global().Create(env_name);
    const ScenarioSpace& s = env->space();
    return py::make_tuple(s.lower(), s.upper(), s.dim_names());
  });

  m.def("percentile",
        [](const std::vector<double>& values, double q) {
          return Percentile(values, q);
        },
        py::arg("values"), py::arg("q"), "Nearest-rank percentile, q in [0, 1].");

  m.def(
      "classify_potential",
      [](double p_s, const std::vector<double>& potentials, double alpha) {
        return ClassifyPotential(p_s, potentials, alpha) == PotentialClass::kLow
                   ? "low"
                   : "high";
      },
      py::arg("potential"), py::arg("corpus_potentials"), py::arg("alpha"));

  m.def(
      "sensitivity_from_rewards",
      [](double r_seed, double r_delta, const std::vector<double>& delta) {
        return SensitivityFromRewards(r_seed, r_delta, delta);
      },
      py::arg("r_seed"), py::arg("r_delta"), py::arg("delta"));

  m.def(
      "diversity_counts",
      [](const std::vector<std::vector<std::vector<double>>>& trajectories,
         int intervals) {
        std::vector<Trajectory> trajs;
        for (const auto& t : trajectories) {
          Trajectory traj;
          int frame = 0;
          for (const auto& obs : t) traj.push_back(EnvState{obs, frame++});
          trajs.push_back(std::move(traj));
        }
        const DiversityCounts c = ComputeDiversityCounts(trajs, intervals);
        return py::make_tuple(c.n_initial, c.n_terminal, c.n_entire);
      },
      py::arg("trajectories"), py::arg("intervals") = 10,
      "(#initial, #terminal, #entire) cells covered by the trajectories.");

  m.def(
      "parse_response",
      [](const std::string& text, const std::string& env_name,
         const std::string& marker) -> py::object {
        auto env = EnvironmentRegistry::Global().Create(env_name);
        const ParseResult r = ParseScenarioResponse(text, env->space(), marker,
                                                    env->constraint_hook());
        if (const auto* s = std::get_if<Scenario>(&r)) return py::cast(s->params);
        const auto& e = std::get<ParseError>(r);
        throw py::value_error(std::string(ParseErrorKindName(e.kind)) + ": " +
                              e.message);
      },
      py::arg("text"), py::arg("environment"),
      py::arg("marker") = "New Scenario:",
      "Scenario parameters after the last marker; ValueError names the parse "
      "error class.");

  m.def(
      "default_config",
      [](const std::string& env_name) {
        return ConfigToToml(DefaultConfig(env_name));
      },
      py::arg("environment"), "Shipped defaults as TOML.");

  m.def(
      "resolve_config",
      [](const std::string& toml_text, const std::vector<std::string>& overrides) {
        return ConfigToToml(ParseConfig(toml_text, overrides));
      },
      py::arg("toml"), py::arg("overrides") = std::vector<std::string>{},
      "Validated, fully resolved config as TOML.");

  m.def(
      "run_campaign",
      [](const std::string& toml_text, const std::vector<std::string>& overrides) {
        const CampaignConfig config = ParseConfig(toml_text, overrides);
        CampaignReport r;
        {
          py::gil_scoped_release release;
          r = RunCampaign(config);
        }
        return ReportToDict(r);
      },
      py::arg("toml"), py::arg("overrides") = std::vector<std::string>{},
      "Run a campaign from TOML text and return its summary.");

  m.def(
      "replay_failure",
      [](const std::string& dir, int64_t index) {
        namespace fs = std::filesystem;
        const CampaignConfig config =
            ParseConfig(ReadText((fs::path(dir) / "config.snapshot").string()));
        const auto records =
            LoadFailureRecords((fs::path(dir) / "failures.jsonl").string());
        if (index < 0 || index >= static_cast<int64_t>(records.size())) {
          throw py::index_error("failure index out of range");
        }
        auto env = EnvironmentRegistry::Global().Create(config.environment,
                                                        config.env_params);
        const Trajectory t = ReplayFailure(records[index], *env, config.max_frames);
        return static_cast<int>(t.size()) - 1;
      },
      py::arg("output_dir"), py::arg("index"),
      "Re-run a recorded failure; returns its failure frame.");
}
