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

#ifndef ONLINEBOOST_BOOSTING_HPP_
#define ONLINEBOOST_BOOSTING_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "onlineboost/data.hpp"

namespace onlineboost {

inline constexpr double kEps = 1e-12;

// Histogram sums are kept in 128-bit fixed point (2^-80 resolution) so that
// adding and removing instances is exact and independent of order.
using Fixed = __int128;
inline Fixed to_fixed(double v) { return static_cast<Fixed>(v * 0x1p80); }
inline double from_fixed(Fixed v) { return static_cast<double>(v) * 0x1p-80; }

struct Sums {
  Fixed rp = 0;  // sum of (r - p)
  Fixed pp = 0;  // sum of p (1 - p)

  Sums& operator+=(const Sums& o) {
    rp += o.rp;
    pp += o.pp;
    return *this;
  }
  Sums& operator-=(const Sums& o) {
    rp -= o.rp;
    pp -= o.pp;
    return *this;
  }
  friend Sums operator-(Sums a, const Sums& b) { return a -= b; }
  friend bool operator==(const Sums& a, const Sums& b) { return a.rp == b.rp && a.pp == b.pp; }
  Sums negated() const { return {-rp, -pp}; }
};

// Quantized (r - p, p (1 - p)) of one instance for one class.
Sums derivative_sums(int label, int k, double p);

struct HyperParams {
  int M = 100;
  int J = 20;
  int B = 1024;
  double shrinkage = 0.1;
  double alpha = 0.1;
  double sigma = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<double> softmax_row(const std::vector<double>& F);
void softmax_row(const double* F, int K, double* p);

struct Derivatives {
  std::vector<double> g;
  std::vector<double> h;
};
Derivatives instance_derivatives(int label, const std::vector<double>& p);

// Sum of -log p[label] over rows; p is row-major n x K.
double nll_loss(const std::vector<int>& labels, const std::vector<double>& p, int K);

std::vector<Bin> sample_candidates(const std::vector<Bin>& present_bins, double alpha, std::uint64_t rng_seed);

// Second-order gain of splitting (total) into (left, total - left), in
// derivative sums (g, h). Empty when either child has h-sum <= kEps.
std::optional<double> split_gain(double gl, double hl, double gt, double ht);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t tree_seed(std::uint64_t seed, int m, int k);
inline constexpr std::uint64_t kRootPath = 1;
inline std::uint64_t child_path(std::uint64_t path, int side) { return mix_seed(path, static_cast<std::uint64_t>(side) + 1); }

// Per-node split statistics over the node's persisted candidate thresholds.
// For feature f with sorted candidates c_0 < ... < c_{q-1}, cell j holds the
// sums of instances with bin in (c_{j-1}, c_j]; instances above c_{q-1} are
// implied by the node totals. A split "bin <= c_j" sends cells 0..j left.
struct NodeStats {
  std::vector<std::uint32_t> offset;  // n_features + 1
  std::vector<Bin> cand;
  std::vector<Sums> cell;
  std::vector<std::int32_t> count;
  Sums total;
  std::int64_t n = 0;

  int n_features() const { return offset.empty() ? 0 : static_cast<int>(offset.size()) - 1; }
  int n_candidates() const { return static_cast<int>(cand.size()); }
  // Cell index for bin b of feature f, or -1 when b is above every candidate.
  int cell_of(int f, Bin b) const;
  void apply(const Bin* row, const Sums& d, int dn);
  void clear_sums();
  bool operator==(const NodeStats& o) const;
};

struct Candidate {
  int feature = -1;
  Bin bin = 0;
  double gain = 0;
  double scale = 0;  // GL^2/HL + GR^2/HR, used to tell a real gain from rounding noise
};

struct SplitResult {
  Candidate best;
  // Valid live candidates sorted by preference (gain desc, then feature, then bin).
  std::vector<Candidate> rank_table;
};

// Evaluates every live candidate (non-empty cell) of every feature.
std::optional<SplitResult> find_best_split(const NodeStats& stats, bool with_rank_table = false);
// Gain of the split "bin <= threshold" on feature f, if it is a live valid candidate.
std::optional<Candidate> candidate_gain(const NodeStats& stats, int f, Bin threshold);
// Strict preference order used everywhere splits are compared.
bool prefer(const Candidate& a, const Candidate& b);
bool worth_splitting(const Candidate& c);

double leaf_value(double sum_rp, double sum_pp, int K);

struct TreeNode {
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t parent = -1;
  std::int32_t feature = -1;
  Bin threshold = 0;
  std::uint16_t depth = 0;
  std::uint64_t path = kRootPath;
  double beta = 0;
  double gain = 0;
  NodeStats stats;

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  int route(const Bin* row) const;
  int n_leaves() const;
};

class InstanceStore {
 public:
  InstanceStore() = default;
  InstanceStore(int n_features, int n_classes) : n_features_(n_features), n_classes_(n_classes) {}

  int n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t live_count() const { return live_; }
  std::uint32_t append(int label, const Bin* row);
  void tombstone(std::uint32_t id);
  bool alive(std::uint32_t id) const { return id < alive_.size() && alive_[id]; }
  int label(std::uint32_t id) const { return labels_[id]; }
  // Counted access; the counter backs the never-touch checks.
  const Bin* row(std::uint32_t id) const {
    ++row_reads_;
    return bins_.data() + static_cast<std::size_t>(id) * n_features_;
  }
  const Bin* row_uncounted(std::uint32_t id) const {
    return bins_.data() + static_cast<std::size_t>(id) * n_features_;
  }
  std::uint64_t row_reads() const { return row_reads_; }
  std::vector<std::uint32_t> live_ids() const;

  const std::vector<Bin>& raw_bins() const { return bins_; }
  const std::vector<std::int32_t>& raw_labels() const { return labels_; }
  const std::vector<std::uint8_t>& raw_alive() const { return alive_; }
  void assign(std::vector<Bin> bins, std::vector<std::int32_t> labels, std::vector<std::uint8_t> alive);

 private:
  int n_features_ = 0;
  int n_classes_ = 0;
  std::vector<Bin> bins_;
  std::vector<std::int32_t> labels_;
  std::vector<std::uint8_t> alive_;
  std::size_t live_ = 0;
  mutable std::uint64_t row_reads_ = 0;
};

// Auxiliary state that makes a model online-learnable.
struct TrainingState {
  InstanceStore store;
  // Per tree, per instance id: p_{i,k} that the tree's statistics were built with.
  std::vector<std::vector<double>> prob;
  // Per tree, per instance id: node index of the leaf the instance reaches.
  std::vector<std::vector<std::uint16_t>> leaf;
  // Per instance id x class: current raw score F.
  std::vector<double> score;
};

struct Prediction {
  std::vector<double> prob;
  int label = 0;
};

struct Model {
  HyperParams params;
  int n_classes = 0;
  int n_features = 0;
  BinMapper mapper;
  std::vector<Tree> trees;  // index m * n_classes + k
  bool has_stats = true;
  std::optional<TrainingState> state;

  int n_iterations() const { return n_classes == 0 ? 0 : static_cast<int>(trees.size()) / n_classes; }
  bool online_capable() const { return has_stats && state.has_value(); }
  void raw_scores(const Bin* row, double* F) const;
  Prediction predict_binned(const Bin* row) const;
  Prediction predict(const double* raw) const;
  std::vector<int> predict_labels(const RawDataset& data) const;
  double error_rate(const RawDataset& data) const;
};

struct FitInput {
  const InstanceStore* store = nullptr;
  const std::vector<int>* n_bins = nullptr;  // per feature
  const double* prob = nullptr;              // per instance id, class-k probability
  int k = 0;
  int K = 2;
  double alpha = 1.0;
  std::uint64_t tree_seed = 0;
};

struct FitOutput {
  std::vector<TreeNode> nodes;  // nodes[0] is the subtree root; parent links are local
  std::vector<std::uint32_t> ids;
  std::vector<int> node_of;  // local leaf index for ids[i]
};

// Best-first growth up to `budget` leaves over the given instances.
FitOutput fit_tree(const FitInput& in, std::vector<std::uint32_t> ids, int budget, std::uint16_t depth,
                   std::uint64_t path);

std::vector<int> bin_counts(const BinMapper& mapper);

Model train(const BinnedDataset& data, const BinMapper& mapper, const HyperParams& params);
Model train(const RawDataset& data, const HyperParams& params);

}  // namespace onlineboost

#endif  // ONLINEBOOST_BOOSTING_HPP_
