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

#ifndef ONLINEBOOST_EVAL_HPP_
#define ONLINEBOOST_EVAL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "onlineboost/boosting.hpp"
#include "onlineboost/online.hpp"

namespace onlineboost {

// Gaussian blobs: one random center per class, unit-variance noise around it.
RawDataset make_blobs(std::size_t n, int n_features, int n_classes, double center_spread, std::uint64_t seed);

// Random disjoint split of row indices: `take` rows and the rest, both sorted.
struct RowSplit {
  std::vector<std::size_t> take;
  std::vector<std::size_t> rest;
};
RowSplit random_split(std::size_t n, std::size_t take, std::uint64_t seed);
// Batch size for a spec that is a count when >= 1 and a fraction of n otherwise.
std::size_t batch_count(double spec, std::size_t n);

struct SimilarityReport {
  std::size_t n = 0;
  double c2w = 0;  // a correct, b wrong
  double w2c = 0;  // a wrong, b correct
  double w2w = 0;  // both wrong with different predictions
  double phi = 1;
};
SimilarityReport functional_similarity(const std::vector<int>& pred_a, const std::vector<int>& pred_b,
                                       const std::vector<int>& truth);
SimilarityReport functional_similarity(const Model& a, const Model& b, const RawDataset& test);

struct LeafErrorReport {
  double error = 0;
  double sum_abs_diff = 0;
  double sum_abs_ref = 0;
  std::size_t n_leaves = 0;
};
// Both models must share every tree's structure.
LeafErrorReport leaf_score_error(const Model& online, const Model& reference);
// Reference with the same structure whose leaves are refit by a fresh boosting
// pass over the model's live instances.
Model refit_leaves(const Model& model);

struct BackdoorConfig {
  double poison_fraction = 0.05;
  std::vector<int> trigger_features = {0, 1, 2};
  // Empty means each trigger feature's largest trained value.
  std::vector<double> trigger_values;
  int target_label = 0;
  std::uint64_t seed = 0;
  OnlineOptions online;
};

struct PhaseResult {
  std::string phase;
  double clean_accuracy = 0;
  double asr = 0;
  double seconds = 0;
};

struct BackdoorReport {
  std::size_t n_train = 0;
  std::size_t n_poison = 0;
  std::vector<PhaseResult> phases;  // Train Clean, Train Backdoor, Add Backdoor, Remove Backdoor
  const PhaseResult& phase(const std::string& name) const;
};

BackdoorReport run_backdoor_experiment(const RawDataset& train, const RawDataset& test, const HyperParams& params,
                                       const BackdoorConfig& cfg);
// Test rows with the trigger applied and every label set to the target.
RawDataset apply_trigger(const RawDataset& data, const std::vector<int>& features, const std::vector<double>& values,
                         int target_label);

enum class StepOp { kAdd, kDelete };
struct ScheduleStep {
  StepOp op = StepOp::kAdd;
  int part = 0;
};
struct ScheduleConfig {
  int n_parts = 20;
  std::vector<int> initial_parts = {0};
  std::vector<ScheduleStep> steps;
  std::uint64_t seed = 0;
  bool retrain_reference = true;
  OnlineOptions online;
};
// Parts 0..n_parts-1: ramp up by adding 1..n-1, then ramp down deleting n-1..1.
ScheduleConfig ramp_schedule(int n_parts);
// Sorted row indices of each equal-size partition used by run_batch_schedule.
std::vector<std::vector<std::size_t>> schedule_partitions(std::size_t n, int n_parts, std::uint64_t seed);

struct SchedulePoint {
  std::string step;
  std::size_t n_rows = 0;
  double online_accuracy = 0;
  double retrain_accuracy = -1;  // negative when no reference was trained
  double online_seconds = 0;
  int retrained_nodes = 0;
};
std::vector<SchedulePoint> run_batch_schedule(const RawDataset& train, const RawDataset& test,
                                              const HyperParams& params, const ScheduleConfig& cfg);

struct SpeedupRow {
  double size_spec = 0;
  std::size_t batch = 0;
  double retrain_seconds = 0;
  double add_seconds = 0;
  double delete_seconds = 0;
  double add_speedup = 0;
  double delete_speedup = 0;
  int add_retrains = 0;
  int delete_retrains = 0;
};
std::vector<SpeedupRow> benchmark_speedup(const RawDataset& train, const HyperParams& params,
                                          const std::vector<double>& sizes, std::uint64_t seed,
                                          const OnlineOptions& online = {});

// Online add/delete of |D'| rows against retraining from scratch.
struct OnlineVsRetrain {
  double size_spec = 0;
  std::size_t batch = 0;
  double base_error = 0;  // trained on all rows
  double add_error = 0;   // trained without D', then D' added
  double delete_error = 0;
  double add_retrain_error = 0;  // equals base_error
  double delete_retrain_error = 0;
  SimilarityReport add_similarity;
  SimilarityReport delete_similarity;
};
OnlineVsRetrain compare_online_to_retrain(const RawDataset& train, const RawDataset& test, const HyperParams& params,
                                          double size_spec, std::uint64_t seed, const OnlineOptions& online = {});

std::string to_json(const SimilarityReport& r);
std::string to_json(const LeafErrorReport& r);
std::string to_json(const BackdoorReport& r);
std::string to_json(const std::vector<SchedulePoint>& r);
std::string to_json(const std::vector<SpeedupRow>& r);
std::string to_json(const OnlineVsRetrain& r);
std::string to_csv(const BackdoorReport& r);
std::string to_csv(const std::vector<SchedulePoint>& r);
std::string to_csv(const std::vector<SpeedupRow>& r);
// Line plot of online and retrain accuracy per schedule step.
std::string schedule_svg(const std::vector<SchedulePoint>& r);

}  // namespace onlineboost

#endif  // ONLINEBOOST_EVAL_HPP_
