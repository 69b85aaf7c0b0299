#include "scenfuzz/campaign.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "scenfuzz/error.h"

namespace scenfuzz {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("scenfuzz_campaign_test_" + name + "_" +
                        std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CampaignConfig Small(const std::string& env, Method method, int64_t budget) {
  CampaignConfig c = DefaultConfig(env);
  c.method = method;
  c.budget = budget;
  c.seed = 3;
  return c;
}

TEST(CampaignTest, RandomBaselineRunsExactBudget) {
  const CampaignReport r =
      RunCampaign(Small("collision-avoidance-2d", Method::kRandom, 100));
  EXPECT_EQ(r.tests_run, 100);
  EXPECT_EQ(r.cumulative_failures.size(), 100u);
  EXPECT_EQ(r.failure_rate_series.size(), 100u);
  EXPECT_EQ(r.origins.size(), 100u);
  EXPECT_EQ(r.cumulative_failures.back(), r.failures);
  EXPECT_EQ(r.llm_calls, 0);
  for (Origin o : r.origins) EXPECT_EQ(o, Origin::kInitialSample);
  for (double a : r.alpha_series) EXPECT_TRUE(std::isnan(a));
  EXPECT_EQ(r.failures + r.added + r.discarded, r.tests_run);
}

TEST(CampaignTest, MdpFuzzOnlyMutatesRandomly) {
  const CampaignReport r =
      RunCampaign(Small("collision-avoidance-2d", Method::kMdpFuzz, 150));
  EXPECT_EQ(r.tests_run, 150);
  EXPECT_EQ(r.llm_calls, 0);
  EXPECT_EQ(r.random_calls, 150);
  for (Origin o : r.origins) EXPECT_EQ(o, Origin::kRandomMutation);
  EXPECT_EQ(r.failures + r.added + r.discarded, r.tests_run);
}

TEST(CampaignTest, SeriesAreConsistent) {
  const CampaignReport r =
      RunCampaign(Small("coop-nav", Method::kLlmTester, 200));
  int64_t prev = 0;
  for (size_t i = 0; i < r.cumulative_failures.size(); ++i) {
    EXPECT_GE(r.cumulative_failures[i], prev);
    EXPECT_LE(r.cumulative_failures[i] - prev, 1);
    prev = r.cumulative_failures[i];
    EXPECT_DOUBLE_EQ(r.failure_rate_series[i],
                     static_cast<double>(r.cumulative_failures[i]) / (i + 1));
  }
  EXPECT_EQ(static_cast<int64_t>(r.failure_records.size()), r.failures);
  EXPECT_EQ(r.llm_calls + r.random_calls, r.tests_run + r.skipped);
  EXPECT_EQ(r.failures + r.added + r.discarded, r.tests_run);
}

TEST(CampaignTest, AlphaUpdatedOncePerFailure) {
  const CampaignReport r =
      RunCampaign(Small("collision-avoidance-2d", Method::kLlmTester, 300));
  ASSERT_GT(r.failures, 0);
  EXPECT_EQ(r.alpha_updates, r.failures);
  EXPECT_EQ(static_cast<int64_t>(r.alpha_trace.size()), r.failures);
  for (double a : r.alpha_trace) {
    EXPECT_GT(a, 0.0);
    EXPECT_LE(a, 100.0);
  }
  EXPECT_EQ(r.final_alpha, r.alpha_trace.back());
}

TEST(CampaignTest, SingleScaleArmAlwaysAsksTheModel) {
  const CampaignReport r =
      RunCampaign(Small("coop-nav", Method::kLlmTesterNoMs, 100));
  EXPECT_EQ(r.random_calls, 0);
  EXPECT_EQ(r.alpha_updates, 0);
  for (Origin o : r.origins) EXPECT_EQ(o, Origin::kLlmMutation);
}

TEST(CampaignTest, DeterministicArtifacts) {
  CampaignConfig c = Small("coop-nav", Method::kLlmTester, 150);
  c.output_dir = TempDir("det_a").string();
  RunCampaign(c);
  const fs::path a = c.output_dir;
  c.output_dir = TempDir("det_b").string();
  RunCampaign(c);
  const fs::path b = c.output_dir;
  for (const char* f :
       {"failures.jsonl", "metrics.csv", "corpus.jsonl", "llm_log.jsonl"}) {
    EXPECT_EQ(Slurp(a / f), Slurp(b / f)) << f;
    EXPECT_FALSE(Slurp(a / f).empty()) << f;
  }
  EXPECT_EQ(ExtractResultsSection(Slurp(a / "report.md")),
            ExtractResultsSection(Slurp(b / "report.md")));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(CampaignTest, RecomputedResultsMatchReport) {
  CampaignConfig c = Small("collision-avoidance-2d", Method::kLlmTester, 200);
  c.output_dir = TempDir("recompute").string();
  const CampaignReport live = RunCampaign(c);
  const CampaignReport again = RecomputeReport(c.output_dir);
  EXPECT_EQ(again.failures, live.failures);
  EXPECT_EQ(again.diversity, live.diversity);
  EXPECT_EQ(RenderResults(again), RenderResults(live));
  EXPECT_EQ(ExtractResultsSection(Slurp(fs::path(c.output_dir) / "report.md")),
            RenderResults(live));
  fs::remove_all(c.output_dir);
}

TEST(CampaignTest, FailuresReplayAndTamperingIsDetected) {
  CampaignConfig c = Small("collision-avoidance-2d", Method::kMdpFuzz, 200);
  c.output_dir = TempDir("replay").string();
  const CampaignReport r = RunCampaign(c);
  const auto records =
      LoadFailureRecords((fs::path(c.output_dir) / "failures.jsonl").string());
  ASSERT_EQ(records, r.failure_records);
  ASSERT_FALSE(records.empty());
  auto env = EnvironmentRegistry::Global().Create(c.environment);
  for (const FailureRecord& rec : records) {
    EXPECT_EQ(static_cast<int>(ReplayFailure(rec, *env, c.max_frames).size()),
              rec.frames + 1);
  }
  FailureRecord tampered = records.front();
  tampered.frames += 1;
  try {
    ReplayFailure(tampered, *env, c.max_frames);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReplayDivergence);
  }
  tampered = records.front();
  tampered.params = {4500, 4500, 0, 50, 50};  // never meets the ownship
  EXPECT_THROW(ReplayFailure(tampered, *env, c.max_frames), Error);
  fs::remove_all(c.output_dir);
}

TEST(FailureRecordTest, JsonRoundTripAndErrors) {
  FailureRecord r;
  r.index = 3;
  r.iteration = 17;
  r.id = 99;
  r.parent = 12;
  r.origin = Origin::kLlmMutation;
  r.params = {0.1, 1.0 / 3.0, -2e-9};
  r.frames = 14;
  r.failure_kind = "collision";
  r.reward = -12.5;
  EXPECT_EQ(ParseFailureRecord(FailureRecordToJson(r)), r);
  r.parent.reset();
  EXPECT_EQ(ParseFailureRecord(FailureRecordToJson(r)), r);
  EXPECT_THROW(ParseFailureRecord("{"), Error);
  EXPECT_THROW(ParseFailureRecord(R"({"schema_version": 99})"), Error);
}

TEST(CampaignTest, MockBackendDrivesGeneration) {
  CampaignConfig c = Small("coop-nav", Method::kLlmTesterNoMs, 20);
  c.backend = BackendKind::kMock;
  c.mock_responses = {
      "New Scenario: [0.08, -0.39, 0.47, -0.49, -0.11, 0.27, -0.6, -0.22, "
      "-0.9, -0.9, 0.62, -0.53]"};
  const CampaignReport r = RunCampaign(c);
  EXPECT_EQ(r.tests_run, 20);
  // This scenario collides at frame 1 every time.
  EXPECT_EQ(r.failures, 20);
  EXPECT_EQ(r.llm_requests, 20);
}

TEST(CampaignTest, UnparsableRepliesSkipThenAbort) {
  CampaignConfig c = Small("coop-nav", Method::kLlmTesterNoMs, 20);
  c.backend = BackendKind::kMock;
  c.mock_responses = {"no scenario here"};
  c.max_consecutive_skips = 5;
  try {
    RunCampaign(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeneration);
  }
}

TEST(CompareTest, RequiresMatchingSettings) {
  CampaignConfig a = Small("coop-nav", Method::kRandom, 50);
  CampaignConfig b = Small("coop-nav", Method::kMdpFuzz, 60);
  try {
    CompareMethods({a, b});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(CompareTest, ReportsCallOrdering) {
  const Comparison cmp =
      CompareMethods({Small("coop-nav", Method::kLlmTester, 100),
                      Small("coop-nav", Method::kLlmTesterNoMs, 100)});
  ASSERT_EQ(cmp.rows.size(), 2u);
  ASSERT_EQ(cmp.assertions.size(), 1u);
  EXPECT_NE(cmp.assertions[0].find("llm_calls(llmtester)"), std::string::npos);
  const std::string table = RenderComparison(cmp);
  EXPECT_NE(table.find("llmtester-no-ms"), std::string::npos);
  EXPECT_EQ(cmp.rows[1].llm_calls, 100 + cmp.reports[1].skipped);
}

}  // namespace
}  // namespace scenfuzz
