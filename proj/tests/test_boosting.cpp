// Copyright 2026 The OnlineBoost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "onlineboost/boosting.hpp"
#include "test_util.hpp"

namespace onlineboost {
namespace {

TEST(Softmax, LargeScoresDoNotOverflow) {
  auto p = softmax_row({700.0, 0.0});
  EXPECT_TRUE(std::isfinite(p[0]) && std::isfinite(p[1]));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_NEAR(p[1], std::exp(-700.0), 1e-310);
}

TEST(Softmax, EqualScoresAreUniform) {
  auto p = softmax_row({2.5, 2.5, 2.5});
  for (double v : p) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(Derivatives, DocumentedValues) {
  auto d0 = instance_derivatives(0, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(d0.g[0], -0.5);
  EXPECT_DOUBLE_EQ(d0.g[1], 0.5);
  EXPECT_DOUBLE_EQ(d0.h[0], 0.25);
  EXPECT_DOUBLE_EQ(d0.h[1], 0.25);
  auto d1 = instance_derivatives(1, {0.2, 0.8});
  EXPECT_NEAR(d1.g[0], 0.2, 1e-15);
  EXPECT_NEAR(d1.g[1], -0.2, 1e-15);
  EXPECT_NEAR(d1.h[0], 0.16, 1e-15);
  EXPECT_NEAR(d1.h[1], 0.16, 1e-15);
}

TEST(Derivatives, FixedPointSumsRoundTrip) {
  Sums s = derivative_sums(1, 1, 0.8);
  EXPECT_NEAR(from_fixed(s.rp), 0.2, 1e-15);
  EXPECT_NEAR(from_fixed(s.pp), 0.16, 1e-15);
  Sums acc;
  acc += s;
  acc += derivative_sums(0, 1, 0.3);
  acc -= s;
  EXPECT_TRUE(acc == derivative_sums(0, 1, 0.3));
}

TEST(Loss, HalfProbabilityIsLn2) {
  EXPECT_DOUBLE_EQ(nll_loss({0}, {0.5, 0.5}, 2), std::log(2.0));
}

TEST(Sampling, SizeSortedSubsetDeterministic) {
  std::vector<Bin> present(1024);
  for (int i = 0; i < 1024; ++i) present[i] = static_cast<Bin>(i);
  auto a = sample_candidates(present, 0.1, 99);
  EXPECT_EQ(a.size(), 103u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<Bin>(a.begin(), a.end()).size(), a.size());
  EXPECT_EQ(a, sample_candidates(present, 0.1, 99));
  EXPECT_NE(a, sample_candidates(present, 0.1, 100));
  EXPECT_EQ(sample_candidates(present, 1.0, 5), present);
  EXPECT_EQ(sample_candidates({3, 9}, 0.01, 5).size(), 1u);
}

TEST(SplitGain, DocumentedExample) {
  // g = [-.5, -.5, .5, .5], h = .25 each, split after the second instance.
  auto gain = split_gain(-1.0, 0.5, 0.0, 1.0);
  ASSERT_TRUE(gain.has_value());
  EXPECT_DOUBLE_EQ(*gain, 4.0);
  EXPECT_FALSE(split_gain(-1.0, 0.0, 0.0, 1.0).has_value());
  EXPECT_FALSE(split_gain(-1.0, 1.0, 0.0, 1.0).has_value());
}

TEST(LeafValue, DocumentedValues) {
  EXPECT_DOUBLE_EQ(leaf_value(0.5, 0.25, 2), 1.0);
  EXPECT_NEAR(leaf_value(0.8, 0.46, 3), 1.15942, 1e-5);
  EXPECT_EQ(leaf_value(3.0, 1e-13, 3), 0.0);
}

TEST(Preference, GainThenFeatureThenBin) {
  Candidate a{1, 5, 2.0, 0}, b{0, 9, 2.0, 0}, c{0, 3, 2.0, 0}, d{3, 1, 2.5, 0};
  EXPECT_TRUE(prefer(b, a));
  EXPECT_TRUE(prefer(c, b));
  EXPECT_TRUE(prefer(d, c));
  EXPECT_FALSE(prefer(a, a));
}

TEST(HyperParams, Validation) {
  HyperParams hp;
  EXPECT_NO_THROW(hp.validate());
  hp.alpha = 1.5;
  EXPECT_THROW(hp.validate(), std::invalid_argument);
  hp = {};
  hp.sigma = -0.1;
  EXPECT_THROW(hp.validate(), std::invalid_argument);
  hp = {};
  hp.J = 1;
  EXPECT_THROW(hp.validate(), std::invalid_argument);
}

// Builds a root node over random instances and compares the library's best
// split with a double-precision brute force over the same candidates.
TEST(SplitSearch, MatchesBruteForceOnRandomNodes) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) EXPECT_EQ(testing::check_random_split(rng), "") << "trial " << trial;
}

TEST(SplitSearch, RankTableIsSortedAndComplete) {
  auto raw = testing::random_grid_data(200, 3, 2, 8, 5);
  HyperParams hp;
  hp.M = 1;
  hp.J = 2;
  hp.alpha = 1;
  Model m = train(raw, hp);
  const NodeStats& s = m.trees[0].nodes[0].stats;
  auto r = find_best_split(s, true);
  ASSERT_TRUE(r);
  EXPECT_TRUE(std::is_sorted(r->rank_table.begin(), r->rank_table.end(), prefer));
  EXPECT_EQ(r->rank_table.front().feature, r->best.feature);
  EXPECT_EQ(r->rank_table.front().bin, r->best.bin);
}

class TrainedModel : public ::testing::Test {
 protected:
  void SetUp() override {
    raw_ = make_blobs(600, 5, 3, 1.5, 11);
    hp_.M = 8;
    hp_.J = 6;
    hp_.B = 64;
    model_ = train(raw_, hp_);
  }
  RawDataset raw_;
  HyperParams hp_;
  Model model_;
};

TEST_F(TrainedModel, TreesRespectLeafBudget) {
  ASSERT_EQ(model_.trees.size(), static_cast<std::size_t>(hp_.M * 3));
  int full = 0;
  for (const auto& t : model_.trees) {
    EXPECT_LE(t.n_leaves(), hp_.J);
    full += t.n_leaves() == hp_.J ? 1 : 0;
  }
  EXPECT_GT(full, 0);
}

TEST_F(TrainedModel, PredictionOnTrainingRowsMatchesStoredScores) {
  const auto& st = *model_.state;
  for (std::uint32_t id = 0; id < st.store.size(); ++id) {
    auto pr = model_.predict_binned(st.store.row_uncounted(id));
    auto p = softmax_row(std::vector<double>(st.score.begin() + id * 3, st.score.begin() + id * 3 + 3));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(pr.prob[k], p[k], 1e-9);
  }
}

TEST_F(TrainedModel, StatisticsMatchFromScratch) { EXPECT_EQ(testing::check_all_stats(model_), ""); }

TEST_F(TrainedModel, TrainingIsBitDeterministic) {
  Model again = train(raw_, hp_);
  ASSERT_EQ(again.trees.size(), model_.trees.size());
  for (std::size_t t = 0; t < again.trees.size(); ++t) {
    const auto& a = again.trees[t].nodes;
    const auto& b = model_.trees[t].nodes;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t v = 0; v < a.size(); ++v) {
      EXPECT_EQ(a[v].feature, b[v].feature);
      EXPECT_EQ(a[v].threshold, b[v].threshold);
      EXPECT_EQ(std::bit_cast<std::uint64_t>(a[v].beta), std::bit_cast<std::uint64_t>(b[v].beta));
    }
  }
  EXPECT_EQ(again.state->score, model_.state->score);
}

TEST_F(TrainedModel, TrainingLossDecreases) {
  HyperParams one = hp_;
  one.M = 1;
  Model short_model = train(raw_, one);
  auto loss = [](const Model& m) {
    const auto& st = *m.state;
    std::vector<double> p(st.score.size());
    for (std::size_t i = 0; i < st.store.size(); ++i) softmax_row(&st.score[i * 3], 3, &p[i * 3]);
    std::vector<int> labels(st.store.raw_labels().begin(), st.store.raw_labels().end());
    return nll_loss(labels, p, 3);
  };
  EXPECT_LT(loss(model_), loss(short_model));
  EXPECT_LT(loss(short_model), 600 * std::log(3.0));
}

TEST(Candidates, AlphaOneUsesEveryPresentBin) {
  auto raw = testing::random_grid_data(400, 4, 3, 10, 3);
  HyperParams hp;
  hp.M = 3;
  hp.J = 6;
  hp.alpha = 1.0;
  Model m = train(raw, hp);
  EXPECT_EQ(testing::check_candidates_are_present_bins(m), "");
}

}  // namespace
}  // namespace onlineboost
