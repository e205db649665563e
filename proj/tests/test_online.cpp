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
#include <random>
#include <set>

#include "onlineboost/eval.hpp"
#include "onlineboost/online.hpp"
#include "test_util.hpp"

namespace onlineboost {
namespace {

std::vector<std::uint32_t> iota_ids(std::uint32_t from, std::uint32_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = from + i;
  return v;
}

// Snapshot of every leaf value and node statistic for exact comparisons.
struct Snapshot {
  std::vector<std::vector<double>> betas;
  std::vector<std::vector<NodeStats>> stats;
};
Snapshot snapshot(const Model& m) {
  Snapshot s;
  for (const auto& t : m.trees) {
    s.betas.emplace_back();
    s.stats.emplace_back();
    for (const auto& n : t.nodes) {
      s.betas.back().push_back(n.beta);
      s.stats.back().push_back(n.stats);
    }
  }
  return s;
}

class OnlineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    raw_ = make_blobs(900, 6, 3, 1.2, 21);
    hp_.M = 6;
    hp_.J = 8;
    hp_.B = 64;
    mapper_ = build_bin_mapper(raw_, hp_.B);
    binned_ = apply_bins(raw_, mapper_);
  }
  Model train_rows(const std::vector<std::size_t>& rows, const HyperParams& hp) const {
    return train(testing::binned_subset(binned_, rows), mapper_, hp);
  }
  RawDataset raw_;
  HyperParams hp_;
  BinMapper mapper_;
  BinnedDataset binned_;
};

TEST_F(OnlineTest, DecrementalEqualsRetrainInExactMode) {
  HyperParams hp = hp_;
  hp.alpha = 1.0;
  hp.sigma = 0.0;
  OnlineOptions opt;
  opt.policy = DerivativePolicy::kEager;
  for (std::uint64_t draw = 0; draw < 4; ++draw) {
    RowSplit split = random_split(binned_.size(), 5 + draw * 7, draw);
    std::vector<std::size_t> all(binned_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Model online = train_rows(all, hp);
    decremental_learn(online, std::vector<std::uint32_t>(split.take.begin(), split.take.end()), opt);
    Model ref = train_rows(split.rest, hp);
    EXPECT_EQ(testing::compare_models(online, ref, 1e-12), "") << "draw " << draw;
    EXPECT_EQ(testing::check_all_stats(online), "");
  }
}

TEST_F(OnlineTest, StatisticsStayExactUnderInterleavedBatches) {
  std::vector<std::size_t> first(600);
  for (std::size_t i = 0; i < 600; ++i) first[i] = i;
  Model m = train_rows(first, hp_);
  std::mt19937_64 rng(3);
  std::size_t next = 600;
  for (int step = 0; step < 6; ++step) {
    if (step % 2 == 0) {
      std::vector<std::size_t> rows;
      for (int i = 0; i < 40; ++i) rows.push_back(next++);
      incremental_learn(m, testing::binned_subset(binned_, rows));
    } else {
      auto live = m.state->store.live_ids();
      std::shuffle(live.begin(), live.end(), rng);
      live.resize(30);
      OnlineOptions opt;
      opt.policy = step == 3 ? DerivativePolicy::kEager : DerivativePolicy::kLazy;
      decremental_learn(m, live, opt);
    }
    ASSERT_EQ(testing::check_all_stats(m), "") << "step " << step;
  }
}

TEST_F(OnlineTest, AddThenDeleteWithoutRetrainsRestoresModel) {
  std::vector<std::size_t> first(800);
  for (std::size_t i = 0; i < 800; ++i) first[i] = i;
  HyperParams hp = hp_;
  hp.sigma = 1.0;
  Model m = train_rows(first, hp);
  Snapshot before = snapshot(m);
  std::vector<std::size_t> extra;
  for (std::size_t i = 800; i < 860; ++i) extra.push_back(i);
  auto add = incremental_learn(m, testing::binned_subset(binned_, extra));
  EXPECT_EQ(add.retrained_nodes, 0);
  auto del = decremental_learn(m, add.ids);
  EXPECT_EQ(del.retrained_nodes, 0);
  Snapshot after = snapshot(m);
  ASSERT_EQ(after.betas.size(), before.betas.size());
  for (std::size_t t = 0; t < before.betas.size(); ++t) {
    for (std::size_t v = 0; v < before.betas[t].size(); ++v) {
      EXPECT_NEAR(after.betas[t][v], before.betas[t][v], 1e-9 * std::max(1.0, std::abs(before.betas[t][v])));
      EXPECT_TRUE(after.stats[t][v] == before.stats[t][v]);
    }
  }
}

TEST_F(OnlineTest, SigmaOneNeverRetrainsAndNeverReadsTrainingRows) {
  std::vector<std::size_t> first(700);
  for (std::size_t i = 0; i < 700; ++i) first[i] = i;
  Model m = train_rows(first, hp_);
  OnlineOptions opt;
  opt.sigma = 1.0;
  std::vector<std::size_t> extra;
  for (std::size_t i = 700; i < 760; ++i) extra.push_back(i);
  auto add = incremental_learn(m, testing::binned_subset(binned_, extra), opt);
  EXPECT_EQ(add.retrained_nodes, 0);
  EXPECT_EQ(add.training_row_reads, 0u);
  EXPECT_EQ(add.derivative_writes, 0);
  auto del = decremental_learn(m, iota_ids(0, 50), opt);
  EXPECT_EQ(del.retrained_nodes, 0);
  EXPECT_EQ(del.training_row_reads, 0u);
  for (int c : del.retrained_per_iteration) EXPECT_EQ(c, 0);
}

TEST_F(OnlineTest, LeavesWithoutBatchInstancesKeepBitExactValues) {
  std::vector<std::size_t> first(850);
  for (std::size_t i = 0; i < 850; ++i) first[i] = i;
  Model m = train_rows(first, hp_);
  Snapshot before = snapshot(m);
  Model copy = m;
  OnlineOptions opt;
  opt.sigma = 1.0;
  auto ids = iota_ids(10, 3);
  decremental_learn(m, ids, opt);
  for (std::size_t t = 0; t < m.trees.size(); ++t) {
    std::set<int> reached;
    for (auto id : ids) {
      const Bin* row = copy.state->store.row_uncounted(id);
      int v = 0;
      while (true) {
        reached.insert(v);
        if (copy.trees[t].nodes[v].is_leaf()) break;
        const auto& n = copy.trees[t].nodes[v];
        v = row[n.feature] <= n.threshold ? n.left : n.right;
      }
    }
    for (std::size_t v = 0; v < m.trees[t].nodes.size(); ++v) {
      if (reached.count(static_cast<int>(v))) continue;
      EXPECT_EQ(std::bit_cast<std::uint64_t>(m.trees[t].nodes[v].beta), std::bit_cast<std::uint64_t>(before.betas[t][v]));
      EXPECT_TRUE(m.trees[t].nodes[v].stats == before.stats[t][v]);
    }
  }
}

TEST_F(OnlineTest, LazyPolicyWritesNoDerivativesWithoutRetrain) {
  std::vector<std::size_t> first(800);
  for (std::size_t i = 0; i < 800; ++i) first[i] = i;
  Model m = train_rows(first, hp_);
  OnlineOptions opt;
  opt.log_decisions = true;
  auto r = decremental_learn(m, iota_ids(0, 2), opt);
  if (r.retrained_nodes == 0) {
    EXPECT_EQ(r.derivative_writes, 0);
  }
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    EXPECT_TRUE(r.log[i].decision == Decision::kKeep || r.log[i].decision == Decision::kRetrain);
  }
}

TEST_F(OnlineTest, EagerPolicyRefreshesOnlyMovedInstances) {
  std::vector<std::size_t> first(800);
  for (std::size_t i = 0; i < 800; ++i) first[i] = i;
  HyperParams hp = hp_;
  hp.sigma = 1.0;
  Model m = train_rows(first, hp);
  Model fresh_view = m;
  OnlineOptions opt;
  opt.policy = DerivativePolicy::kEager;
  auto r = decremental_learn(m, iota_ids(0, 5), opt);
  EXPECT_EQ(r.retrained_nodes, 0);
  EXPECT_GT(r.derivative_writes, 0);
  // Swapped derivatives keep every node consistent with the stored probabilities.
  EXPECT_EQ(testing::check_all_stats(m), "");
}

TEST_F(OnlineTest, TolerancesAreMonotoneInFirstTree) {
  std::vector<std::size_t> first(800);
  for (std::size_t i = 0; i < 800; ++i) first[i] = i;
  Model base = train_rows(first, hp_);
  std::vector<std::set<std::pair<int, std::uint64_t>>> sets;
  for (double sigma : {0.0, 0.05, 0.2, 0.5, 1.0}) {
    Model m = base;
    OnlineOptions opt;
    opt.sigma = sigma;
    opt.log_decisions = true;
    auto r = decremental_learn(m, iota_ids(0, 40), opt);
    std::set<std::pair<int, std::uint64_t>> s;
    for (const auto& e : r.log) {
      if (e.tree == 0 && e.decision == Decision::kRetrain) s.insert({e.tree, e.path});
    }
    sets.push_back(s);
  }
  for (std::size_t i = 1; i < sets.size(); ++i) {
    for (const auto& x : sets[i]) EXPECT_TRUE(sets[i - 1].count(x)) << "sigma index " << i;
  }
  EXPECT_TRUE(sets.back().empty());
}

TEST_F(OnlineTest, EmptyBatchesAreNoOps) {
  std::vector<std::size_t> first(300);
  for (std::size_t i = 0; i < 300; ++i) first[i] = i;
  Model m = train_rows(first, hp_);
  Snapshot before = snapshot(m);
  BinnedDataset empty;
  empty.n_features = binned_.n_features;
  empty.n_classes = 3;
  auto r1 = incremental_learn(m, empty);
  auto r2 = decremental_learn(m, {});
  EXPECT_EQ(r1.batch_size + r2.batch_size, 0u);
  Snapshot after = snapshot(m);
  EXPECT_EQ(after.betas, before.betas);
  EXPECT_EQ(m.state->store.size(), 300u);
}

TEST_F(OnlineTest, InvalidDeletesAreRejectedBeforeAnyChange) {
  std::vector<std::size_t> first(300);
  for (std::size_t i = 0; i < 300; ++i) first[i] = i;
  Model m = train_rows(first, hp_);
  Snapshot before = snapshot(m);
  EXPECT_EQ(invalid_delete_ids(m, {1, 2, 2, 300, 5}), (std::vector<std::uint32_t>{2, 300}));
  EXPECT_THROW(decremental_learn(m, {1, 300}), DataError);
  EXPECT_EQ(snapshot(m).betas, before.betas);
  decremental_learn(m, {1});
  EXPECT_THROW(decremental_learn(m, {1}), DataError);
}

TEST_F(OnlineTest, DimensionAndLabelChecksOnAdd) {
  std::vector<std::size_t> first(300);
  for (std::size_t i = 0; i < 300; ++i) first[i] = i;
  Model m = train_rows(first, hp_);
  RawDataset wrong;
  wrong.n_features = 2;
  wrong.add_row(0, {1, 2});
  EXPECT_THROW(incremental_learn(m, wrong), DataError);
  RawDataset bad_label = raw_.subset({0});
  bad_label.labels[0] = 7;
  EXPECT_THROW(incremental_learn(m, bad_label), DataError);
}

TEST_F(OnlineTest, AddedRowsArePredictedLikeTrainingRows) {
  std::vector<std::size_t> first(700);
  for (std::size_t i = 0; i < 700; ++i) first[i] = i;
  Model m = train_rows(first, hp_);
  std::vector<std::size_t> extra;
  for (std::size_t i = 700; i < 760; ++i) extra.push_back(i);
  auto r = incremental_learn(m, testing::binned_subset(binned_, extra));
  const auto& st = *m.state;
  for (auto id : r.ids) {
    auto pr = m.predict_binned(st.store.row_uncounted(id));
    auto p = softmax_row(std::vector<double>(st.score.begin() + id * 3, st.score.begin() + id * 3 + 3));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(pr.prob[k], p[k], 1e-9);
  }
}

Sums operator+(Sums x, const Sums& y) { return x += y; }

TEST(SplitDecision, RankAgainstPooledCandidates) {
  // Two features with two candidate cells each; totals give four instances.
  TreeNode node;
  NodeStats& s = node.stats;
  s.offset = {0, 2, 4};
  s.cand = {0, 1, 0, 1};
  auto d = [](int label, double p) { return derivative_sums(label, 0, p); };
  Sums a = d(0, 0.5), b = d(1, 0.5);
  // Feature 0 separates perfectly at bin 0; feature 1 does not.
  s.cell = {a + a, b + b, a + b, a + b};
  s.count = {2, 2, 2, 2};
  s.total = a + a + b + b;
  s.n = 4;
  node.feature = 1;
  node.threshold = 0;
  node.left = 1;
  node.right = 2;
  SplitRank r = current_split_rank(node);
  EXPECT_EQ(r.n_candidates, 2);  // a split at the last cell sends everything left
  EXPECT_EQ(r.rank, 2);
  EXPECT_EQ(keep_budget(0.0, 2), 1);
  EXPECT_EQ(keep_budget(0.5, 2), 1);
  EXPECT_EQ(keep_budget(0.51, 2), 2);
  EXPECT_EQ(evaluate_split_decision(node, 0.0), Decision::kRetrain);
  EXPECT_EQ(evaluate_split_decision(node, 1.0), Decision::kKeep);
  node.feature = 0;
  EXPECT_EQ(current_split_rank(node).rank, 1);
  EXPECT_EQ(evaluate_split_decision(node, 0.0), Decision::kKeep);
  // Emptying the left cell of the current split makes it invalid.
  s.total -= s.cell[0];
  s.cell[0] = Sums{};
  s.count[0] = 0;
  EXPECT_EQ(current_split_rank(node).rank, 0);
  EXPECT_EQ(evaluate_split_decision(node, 1.0), Decision::kRetrain);
}

TEST(Robustness, GainRatioAndDistanceChecks) {
  TreeNode node;
  NodeStats& s = node.stats;
  s.offset = {0, 3};
  s.cand = {0, 5, 9};
  auto d = [](int label, double p) { return derivative_sums(label, 0, p); };
  Sums pos = d(0, 0.5), neg = d(1, 0.5);
  s.cell = {pos + pos + pos, neg + neg + neg + pos, neg};
  s.count = {3, 4, 1};
  s.total = s.cell[0] + s.cell[1] + s.cell[2];
  s.n = 8;
  auto lam0 = robustness_diagnostics(node, 0.0);
  ASSERT_TRUE(lam0.has_runner_up);
  EXPECT_GT(lam0.best_gain, lam0.runner_up_gain);
  EXPECT_TRUE(lam0.gain_robust);
  EXPECT_EQ(lam0.n_delta, 5.0);
  EXPECT_TRUE(lam0.distance_robust);
  auto lam_big = robustness_diagnostics(node, 0.9);
  EXPECT_FALSE(lam_big.gain_robust);
  EXPECT_GT(lam_big.distance_bound, lam0.distance_bound);

}

TEST(Reports, JsonContainsCountsAndOptionalLog) {
  UpdateReport r;
  r.mode = UpdateMode::kDelete;
  r.batch_size = 3;
  r.retrained_per_iteration = {1, 0};
  r.log.push_back({0, 1, 42, Decision::kRetrain, 3, 10});
  std::string plain = report_json(r);
  EXPECT_NE(plain.find("\"retrained_per_iteration\""), std::string::npos);
  EXPECT_EQ(plain.find("decisions"), std::string::npos);
  std::string logged = report_json(r, true);
  EXPECT_NE(logged.find("\"retrain\""), std::string::npos);
}

TEST(Regrowth, FreshTreesMatchTheirOwnGrowthOrder) {
  auto raw = make_blobs(400, 4, 2, 1.0, 8);
  HyperParams hp;
  hp.M = 3;
  hp.J = 7;
  hp.B = 32;
  Model m = train(raw, hp);
  for (const auto& t : m.trees) EXPECT_TRUE(matches_regrowth(t, hp.J));
}

}  // namespace
}  // namespace onlineboost
