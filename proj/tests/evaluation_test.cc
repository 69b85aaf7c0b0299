#include "scenfuzz/evaluation.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "scenfuzz/error.h"
#include "scenfuzz/rng.h"

namespace scenfuzz {
namespace {

Trajectory Traj(std::initializer_list<std::vector<double>> states) {
  Trajectory t;
  int frame = 0;
  for (const auto& s : states) t.push_back({s, frame++});
  return t;
}

TEST(PotentialTest, NegatesReward) {
  EpisodeResult r;
  r.cumulative_reward = -3.0;
  EXPECT_EQ(PotentialOf(r), 3.0);
  r.cumulative_reward = 0.0;
  EXPECT_EQ(PotentialOf(r), 0.0);
  EpisodeResult low;
  low.cumulative_reward = 1.0;
  EpisodeResult high;
  high.cumulative_reward = 2.0;
  EXPECT_GT(PotentialOf(low), PotentialOf(high));
}

TEST(CellIndexTest, Edges) {
  const DiversityGrid grid({0.0}, {1.0}, 4);
  EXPECT_EQ(CellIndexOf(std::vector<double>{0.0}, grid), CellIndex{0});
  EXPECT_EQ(CellIndexOf(std::vector<double>{1.0}, grid), CellIndex{3});
}

TEST(CellIndexTest, TwoDimensions) {
  const DiversityGrid grid({0.0, 0.0}, {1.0, 1.0}, 4);
  EXPECT_EQ(CellIndexOf(std::vector<double>{0.26, 0.74}, grid),
            (CellIndex{1, 2}));
}

TEST(CellIndexTest, DegenerateDimensionMapsToZero) {
  const DiversityGrid grid({0.0, 5.0}, {1.0, 5.0}, 4);
  EXPECT_EQ(CellIndexOf(std::vector<double>{0.6, 5.0}, grid), (CellIndex{2, 0}));
}

TEST(CellIndexTest, OutsideBoundsClamps) {
  const DiversityGrid grid({0.0}, {1.0}, 4);
  EXPECT_EQ(CellIndexOf(std::vector<double>{-3.0}, grid), CellIndex{0});
  EXPECT_EQ(CellIndexOf(std::vector<double>{7.0}, grid), CellIndex{3});
}

TEST(CellIndexTest, ArityMismatchThrows) {
  const DiversityGrid grid({0.0, 0.0}, {1.0, 1.0}, 4);
  EXPECT_THROW(CellIndexOf(std::vector<double>{0.5}, grid), Error);
}

TEST(CellIndexTest, AffineCovariance) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const double lo = rng.Uniform(-5, 5);
    const double hi = lo + rng.Uniform(0.5, 10);
    // Power-of-two scale and integer shift keep the arithmetic exact.
    const double scale = 4.0;
    const double shift = 8.0;
    const DiversityGrid a({lo}, {hi}, 7);
    const DiversityGrid b({lo * scale + shift}, {hi * scale + shift}, 7);
    const double x = rng.Uniform(lo, hi);
    EXPECT_EQ(CellIndexOf(std::vector<double>{x}, a),
              CellIndexOf(std::vector<double>{x * scale + shift}, b));
  }
}

TEST(DiversityGridTest, RejectsBadArguments) {
  EXPECT_THROW(DiversityGrid({0.0}, {1.0}, 0), Error);
  EXPECT_THROW(DiversityGrid({2.0}, {1.0}, 3), Error);
}

TEST(DiversityCountsTest, OppositeCornersCoincidentTerminal) {
  const std::vector<Trajectory> trajs{
      Traj({{0.0, 0.0}, {0.5, 0.5}}),
      Traj({{1.0, 1.0}, {0.5, 0.5}}),
  };
  const DiversityCounts c = ComputeDiversityCounts(trajs, 4);
  EXPECT_EQ(c.n_initial, 2);
  EXPECT_EQ(c.n_terminal, 1);
  EXPECT_EQ(c.n_entire, 3);
}

TEST(DiversityCountsTest, SingleStateTrajectory) {
  const std::vector<Trajectory> trajs{Traj({{0.3, 0.3, 0.3}})};
  EXPECT_EQ(ComputeDiversityCounts(trajs, 10), (DiversityCounts{1, 1, 1}));
}

TEST(DiversityCountsTest, DuplicatesDoNotCount) {
  const Trajectory t = Traj({{0.0}, {0.4}, {1.0}});
  const std::vector<Trajectory> once{t, Traj({{0.2}, {0.9}})};
  const std::vector<Trajectory> twice{t, t, Traj({{0.2}, {0.9}}), t};
  EXPECT_EQ(ComputeDiversityCounts(once, 5), ComputeDiversityCounts(twice, 5));
}

TEST(DiversityCountsTest, EmptyInputThrows) {
  EXPECT_THROW(ComputeDiversityCounts(std::vector<Trajectory>{}, 4), Error);
}

TEST(DiversityCountsTest, SubsetsOfEntire) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Trajectory> trajs;
    const int n = 1 + static_cast<int>(rng.Index(5));
    for (int i = 0; i < n; ++i) {
      Trajectory t;
      const int len = 1 + static_cast<int>(rng.Index(6));
      for (int k = 0; k < len; ++k) {
        t.push_back({{rng.Uniform(0, 1), rng.Uniform(0, 1)}, k});
      }
      trajs.push_back(t);
    }
    const DiversityCounts c = ComputeDiversityCounts(trajs, 3);
    EXPECT_LE(c.n_initial, c.n_entire);
    EXPECT_LE(c.n_terminal, c.n_entire);
  }
}

TEST(MetricsTrackerTest, FailureRate) {
  MetricsTracker t;
  EXPECT_THROW(t.FailureRate(), Error);
  for (int i = 0; i < 100; ++i) t.Record(i < 5, Origin::kRandomMutation, 25.0);
  EXPECT_EQ(t.tests_run(), 100);
  EXPECT_EQ(t.failures_found(), 5);
  EXPECT_DOUBLE_EQ(t.FailureRate(), 0.05);
  EXPECT_EQ(t.log().size(), 100u);
  EXPECT_EQ(t.log()[0].iteration, 1);
  EXPECT_TRUE(t.log()[4].failed);
}

TEST(MetricsTrackerTest, ZeroAndFullRates) {
  MetricsTracker none;
  MetricsTracker all;
  for (int i = 0; i < 100; ++i) {
    none.Record(false, Origin::kLlmMutation, 1.0);
    all.Record(true, Origin::kLlmMutation, 1.0);
  }
  EXPECT_EQ(none.FailureRate(), 0.0);
  EXPECT_EQ(all.FailureRate(), 1.0);
}

TEST(MetricsTrackerTest, WindowedRateUsesRecentTests) {
  MetricsTracker t;
  for (int i = 0; i < 10; ++i) t.Record(true, Origin::kLlmMutation, 1.0);
  for (int i = 0; i < 10; ++i) t.Record(false, Origin::kLlmMutation, 1.0);
  EXPECT_DOUBLE_EQ(t.FailureRate(), 0.5);
  EXPECT_DOUBLE_EQ(t.WindowedFailureRate(10), 0.0);
  EXPECT_DOUBLE_EQ(t.WindowedFailureRate(20), 0.5);
  EXPECT_DOUBLE_EQ(t.WindowedFailureRate(1000), 0.5);
}

}  // namespace
}  // namespace scenfuzz
