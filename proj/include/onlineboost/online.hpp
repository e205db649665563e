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

#ifndef ONLINEBOOST_ONLINE_HPP_
#define ONLINEBOOST_ONLINE_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "onlineboost/boosting.hpp"

namespace onlineboost {

class OnlineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DerivativePolicy {
  // Training-instance derivatives are refreshed only for instances that reach
  // a retrained node.
  kLazy,
  // Every training instance whose score moved is refreshed in every later
  // tree, which keeps the model identical to retraining when sigma is 0.
  kEager,
};

enum class UpdateMode { kAdd, kDelete };

struct OnlineOptions {
  DerivativePolicy policy = DerivativePolicy::kLazy;
  // Overrides the model's sigma for this update.
  std::optional<double> sigma;
  bool log_decisions = false;
};

enum class Decision { kKeep, kRetrain };

struct DecisionEntry {
  int tree = 0;
  int depth = 0;
  std::uint64_t path = 0;
  Decision decision = Decision::kKeep;
  int rank = 0;          // 0 when the current split is no longer a valid candidate
  int n_candidates = 0;  // valid live candidates at the node
};

struct UpdateReport {
  UpdateMode mode = UpdateMode::kAdd;
  std::size_t batch_size = 0;
  std::vector<std::uint32_t> ids;  // assigned ids for Add, requested ids for Delete
  std::vector<int> retrained_per_iteration;
  int retrained_nodes = 0;
  // Root retrains forced because the tree no longer matched a best-first regrowth (sigma = 0 only).
  int regrowth_retrains = 0;
  std::int64_t touched_leaves = 0;
  std::int64_t changed_leaves = 0;
  std::int64_t derivative_writes = 0;  // training-instance derivative refreshes
  std::uint64_t training_row_reads = 0;
  double wall_us = 0;
  std::vector<double> iteration_us;
  std::vector<DecisionEntry> log;
};

std::string report_json(const UpdateReport& r, bool with_log = false);

// Rank (1-based) of the node's current split among its valid live candidates,
// or 0 when the current split is no longer valid.
struct SplitRank {
  int rank = 0;
  int n_candidates = 0;
};
SplitRank current_split_rank(const TreeNode& node);
Decision evaluate_split_decision(const TreeNode& node, double sigma);
int keep_budget(double sigma, int n_candidates);

// Appends and learns new rows (raw values are binned with the frozen mapper).
UpdateReport incremental_learn(Model& model, const RawDataset& rows, const OnlineOptions& opt = {});
UpdateReport incremental_learn(Model& model, const BinnedDataset& rows, const OnlineOptions& opt = {});
// Removes previously learned instances by id.
UpdateReport decremental_learn(Model& model, const std::vector<std::uint32_t>& ids, const OnlineOptions& opt = {});

// Ids that are unknown, already deleted, or repeated.
std::vector<std::uint32_t> invalid_delete_ids(const Model& model, const std::vector<std::uint32_t>& ids);

// True when the tree equals what best-first growth over its current statistics
// would produce: every split is its node's best and no leaf would be split
// ahead of an existing split.
bool matches_regrowth(const Tree& tree, int budget);

struct RobustnessReport {
  bool has_runner_up = false;
  double best_gain = 0;
  double runner_up_gain = 0;
  bool gain_robust = true;
  double n_delta = 0;  // bin distance to the nearest other candidate on the same feature
  double distance_bound = 0;
  bool distance_robust = true;
};
// Advisory checks of the best split at a node for a batch fraction lambda.
RobustnessReport robustness_diagnostics(const TreeNode& node, double lambda);

}  // namespace onlineboost

#endif  // ONLINEBOOST_ONLINE_HPP_
