#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "nl2spatial/errors.hpp"
#include "nl2spatial/rollout.hpp"
#include "nl2spatial/syntax.hpp"
#include "support/generators.hpp"

namespace nl2spatial {
namespace {

// obj_1 at the origin, obj_2 on the x-axis at the given distances; unit radii.
Trajectory distance_profile(std::initializer_list<double> distances) {
  std::vector<SceneState> states;
  for (double d : distances) {
    SceneState s;
    s.add({Ident("obj_1"), IdentKind::object, {0, 0}, 1.0, std::nullopt});
    s.add({Ident("obj_2"), IdentKind::object, {d, 0}, 1.0, std::nullopt});
    states.push_back(std::move(s));
  }
  return Trajectory(std::move(states));
}

const Formula kReach = parse_formula("F[0,2](closeTo(obj_1,obj_2;3))");

TEST(ScoreRollouts, InitialRobustnessPerCandidate) {
  std::vector<Trajectory> cands = {distance_profile({9, 8, 7}), distance_profile({5, 3, 1}),
                                   distance_profile({6, 4, 2})};
  auto scores = score_rollouts(cands, kReach);
  ASSERT_EQ(scores.size(), 3u);
  EXPECT_EQ(scores[0].overall, -4.0);
  EXPECT_EQ(scores[1].overall, 2.0);
  EXPECT_EQ(scores[2].overall, 1.0);
  EXPECT_FALSE(scores[0].satisfied);
  EXPECT_TRUE(scores[1].satisfied);
  EXPECT_EQ(select_best(scores), 1u);
}

TEST(ScoreRollouts, MeanModeAveragesTheDomain) {
  std::vector<Trajectory> cands = {distance_profile({5, 3, 1, 9})};
  auto scores = score_rollouts(cands, kReach, ScoreMode::mean);
  // Domain is t = 0, 1: F values 2 and 2.
  ASSERT_EQ(scores[0].trace.values.size(), 2u);
  EXPECT_EQ(scores[0].overall, 2.0);
}

TEST(SelectBest, TiesGoToLowestIndex) {
  std::vector<Trajectory> cands = {distance_profile({9, 9, 9}), distance_profile({5, 3, 1}),
                                   distance_profile({1, 3, 5})};
  auto scores = score_rollouts(cands, kReach);
  EXPECT_EQ(scores[1].overall, scores[2].overall);
  EXPECT_EQ(select_best(scores), 1u);
}

TEST(SelectBest, AgreesWithArgmaxOnRandomRollouts) {
  std::mt19937_64 rng(21);
  std::vector<std::string> ids = {"obj_1", "obj_2", "obj_3", "obj_4"};
  for (int n = 0; n < 100; ++n) {
    auto f = testing::random_formula(rng, {.max_depth = 3, .max_bound = 3});
    std::vector<Trajectory> cands;
    for (int k = 0; k < 5; ++k) cands.push_back(testing::random_trajectory(rng, ids, 12));
    auto scores = score_rollouts(cands, f);
    auto best = select_best(scores);
    for (std::size_t k = 0; k < cands.size(); ++k) {
      double r = robustness_at(cands[k], f, 0);
      EXPECT_EQ(scores[k].overall, r);
      EXPECT_LE(r, scores[best].overall);
      if (k < best) EXPECT_LT(r, scores[best].overall);
    }
  }
}

TEST(SelectBest, PermutationConsistent) {
  std::mt19937_64 rng(22);
  std::vector<std::string> ids = {"obj_1", "obj_2", "obj_3"};
  for (int n = 0; n < 100; ++n) {
    auto f = testing::random_formula(rng, {.max_depth = 3, .max_bound = 3, .idents = ids});
    std::vector<Trajectory> cands;
    for (int k = 0; k < 5; ++k) cands.push_back(testing::random_trajectory(rng, ids, 10));
    auto scores = score_rollouts(cands, f);
    double best = scores[select_best(scores)].overall;
    std::vector<std::size_t> perm = {0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Trajectory> shuffled;
    for (auto k : perm) shuffled.push_back(cands[k]);
    auto s2 = score_rollouts(shuffled, f);
    auto w2 = select_best(s2);
    EXPECT_EQ(s2[w2].overall, best);
    // The permuted winner is the same trajectory unless robustness ties.
    if (std::count_if(scores.begin(), scores.end(), [&](const auto& s) { return s.overall == best; }) == 1)
      EXPECT_EQ(perm[w2], select_best(scores));
  }
}

TEST(SelectBest, AddingCandidatesNeverLowersTheSelectedValue) {
  std::mt19937_64 rng(23);
  std::vector<std::string> ids = {"obj_1", "obj_2", "obj_3"};
  for (int n = 0; n < 50; ++n) {
    auto f = testing::random_formula(rng, {.max_depth = 3, .max_bound = 3, .idents = ids});
    std::vector<Trajectory> cands = {testing::random_trajectory(rng, ids, 10)};
    double previous = score_rollouts(cands, f)[0].overall;
    for (int k = 0; k < 6; ++k) {
      cands.push_back(testing::random_trajectory(rng, ids, 10));
      auto scores = score_rollouts(cands, f);
      double now = scores[select_best(scores)].overall;
      EXPECT_GE(now, previous);
      previous = now;
    }
  }
}

TEST(ScoreRollouts, Errors) {
  std::vector<Trajectory> none;
  EXPECT_THROW(score_rollouts(none, kReach), std::invalid_argument);
  std::vector<Trajectory> short_one = {distance_profile({1, 2})};
  EXPECT_THROW(score_rollouts(short_one, kReach), EmptyDomainError);
  std::vector<Trajectory> ok = {distance_profile({1, 2, 3})};
  EXPECT_THROW(score_rollouts(ok, parse_formula("touch(obj_1,obj_9;1)")), UnknownIdentError);
  EXPECT_THROW(select_best(std::vector<RolloutScore>{}), std::invalid_argument);
}

TEST(ExportTraces, CsvLayout) {
  std::vector<Trajectory> cands = {distance_profile({5, 3, 1, 1}), distance_profile({6, 4, 2, 2})};
  std::ostringstream out;
  export_traces(score_rollouts(cands, kReach), out);
  EXPECT_EQ(out.str(), "candidate,t,robustness\n0,0,2\n0,1,2\n1,0,1\n1,1,1\n");
}

}  // namespace
}  // namespace nl2spatial
