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

#include "onlineboost/online.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "json.hpp"

namespace onlineboost {

int keep_budget(double sigma, int n_candidates) {
  return std::max(1, static_cast<int>(std::ceil(sigma * n_candidates)));
}

SplitRank current_split_rank(const TreeNode& node) {
  SplitRank r;
  auto cur = candidate_gain(node.stats, node.feature, node.threshold);
  const NodeStats& s = node.stats;
  int better = 0;
  for (int f = 0; f < s.n_features(); ++f) {
    Sums left;
    for (std::uint32_t j = s.offset[f]; j < s.offset[f + 1]; ++j) {
      left += s.cell[j];
      if (s.count[j] == 0) continue;
      Sums right = s.total - left;
      double hl = from_fixed(left.pp), hr = from_fixed(right.pp);
      if (hl <= kEps || hr <= kEps) continue;
      ++r.n_candidates;
      if (!cur) continue;
      double gl = from_fixed(left.rp), gr = from_fixed(right.rp), gt = from_fixed(s.total.rp);
      Candidate c;
      c.scale = gl * gl / hl + gr * gr / hr;
      c.gain = c.scale - gt * gt / from_fixed(s.total.pp);
      c.feature = f;
      c.bin = s.cand[j];
      if (prefer(c, *cur)) ++better;
    }
  }
  if (cur) r.rank = better + 1;
  return r;
}

Decision evaluate_split_decision(const TreeNode& node, double sigma) {
  SplitRank r = current_split_rank(node);
  if (r.rank == 0) return Decision::kRetrain;
  return r.rank <= keep_budget(sigma, r.n_candidates) ? Decision::kKeep : Decision::kRetrain;
}

bool matches_regrowth(const Tree& tree, int budget) {
  const auto& nodes = tree.nodes;
  std::vector<std::optional<Candidate>> best(nodes.size());
  int internal = 0;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (auto r = find_best_split(nodes[v].stats)) {
      if (worth_splitting(r->best)) best[v] = r->best;
    }
    if (nodes[v].is_leaf()) continue;
    ++internal;
    if (!best[v] || best[v]->feature != nodes[v].feature || best[v]->bin != nodes[v].threshold) return false;
  }
  std::vector<int> frontier{0};
  int splits = 0;
  while (splits + 1 < budget) {
    int pick = -1;
    for (int i = 0; i < static_cast<int>(frontier.size()); ++i) {
      int v = frontier[i];
      if (!best[v]) continue;
      if (pick < 0) {
        pick = i;
        continue;
      }
      const Candidate& a = *best[v];
      const Candidate& b = *best[frontier[pick]];
      const TreeNode& na = nodes[v];
      const TreeNode& nb = nodes[frontier[pick]];
      bool ahead = a.gain != b.gain ? a.gain > b.gain : na.depth != nb.depth ? na.depth < nb.depth : na.path < nb.path;
      if (ahead) pick = i;
    }
    if (pick < 0) break;
    int v = frontier[pick];
    if (nodes[v].is_leaf()) return false;
    frontier.erase(frontier.begin() + pick);
    frontier.push_back(nodes[v].left);
    frontier.push_back(nodes[v].right);
    ++splits;
  }
  return splits == internal;
}

RobustnessReport robustness_diagnostics(const TreeNode& node, double lambda) {
  RobustnessReport rep;
  auto res = find_best_split(node.stats, true);
  if (!res) return rep;
  const Candidate& s = res->best;
  rep.best_gain = s.gain;
  if (res->rank_table.size() > 1) {
    rep.has_runner_up = true;
    rep.runner_up_gain = res->rank_table[1].gain;
    rep.gain_robust = lambda < 1 && s.gain > rep.runner_up_gain / (1.0 - lambda);
  }

  const NodeStats& st = node.stats;
  Sums left;
  std::int64_t n_left = 0;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::uint32_t j = st.offset[s.feature]; j < st.offset[s.feature + 1]; ++j) {
    if (st.cand[j] <= s.bin) {
      left += st.cell[j];
      n_left += st.count[j];
    }
    if (st.count[j] == 0 || st.cand[j] == s.bin) continue;
    nearest = std::min(nearest, std::abs(static_cast<double>(st.cand[j]) - static_cast<double>(s.bin)));
  }
  rep.n_delta = nearest;
  Sums right = st.total - left;
  const std::int64_t n_right = st.n - n_left;
  double gl = from_fixed(left.rp), hl = from_fixed(left.pp);
  double gr = from_fixed(right.rp), hr = from_fixed(right.pp);
  double denom = 0;
  if (n_left > 0) denom += gl * gl / hl / static_cast<double>(n_left);
  if (n_right > 0) denom += gr * gr / hr / static_cast<double>(n_right);
  rep.distance_bound = denom > 0 ? lambda * s.gain / denom : std::numeric_limits<double>::infinity();
  rep.distance_robust = rep.n_delta > rep.distance_bound;
  return rep;
}

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

class Updater {
 public:
  Updater(Model& model, const OnlineOptions& opt, UpdateMode mode, std::vector<std::uint32_t> batch)
      : model_(model),
        st_(*model.state),
        opt_(opt),
        mode_(mode),
        K_(model.n_classes),
        sigma_(opt.sigma.value_or(model.params.sigma)),
        batch_(std::move(batch)),
        n_bins_(bin_counts(model.mapper)) {}

  UpdateReport run() {
    const auto t0 = Clock::now();
    const std::uint64_t reads0 = st_.store.row_reads();
    const std::size_t N = st_.store.size();
    const int M = model_.n_iterations();
    report_.mode = mode_;
    report_.batch_size = batch_.size();
    report_.ids = batch_;
    report_.retrained_per_iteration.assign(M, 0);
    report_.iteration_us.assign(M, 0.0);

    in_batch_.assign(N, 0);
    for (auto id : batch_) in_batch_[id] = 1;
    f_next_.assign(N * K_, 0.0);
    f_start_.assign(N * K_, 0.0);
    p_start_.assign(N * K_, 0.0);
    p_ready_.assign(N, 0);

    for (int m = 0; m < M; ++m) {
      const auto ti = Clock::now();
      f_start_ = f_next_;
      std::fill(p_ready_.begin(), p_ready_.end(), 0);
      if (opt_.policy == DerivativePolicy::kEager) {
        for (std::size_t i = 0; i < N; ++i) {
          if (participates(static_cast<std::uint32_t>(i))) prob_start(static_cast<std::uint32_t>(i));
        }
      }
      for (int k = 0; k < K_; ++k) update_tree(m, k);
      report_.iteration_us[m] = micros_since(ti);
    }

    if (mode_ == UpdateMode::kDelete) {
      for (auto id : batch_) st_.store.tombstone(id);
    }
    for (std::size_t i = 0; i < N; ++i) {
      if (participates(static_cast<std::uint32_t>(i))) {
        std::copy(f_next_.begin() + i * K_, f_next_.begin() + (i + 1) * K_, st_.score.begin() + i * K_);
      }
    }
    report_.training_row_reads = st_.store.row_reads() - reads0;
    report_.wall_us = micros_since(t0);
    return std::move(report_);
  }

 private:
  // Instances that remain in the model after this update.
  bool participates(std::uint32_t id) const {
    return st_.store.alive(id) && !(mode_ == UpdateMode::kDelete && in_batch_[id]);
  }

  double prob_start(std::uint32_t id) {
    double* p = &p_start_[static_cast<std::size_t>(id) * K_];
    if (!p_ready_[id]) {
      softmax_row(&f_start_[static_cast<std::size_t>(id) * K_], K_, p);
      p_ready_[id] = 1;
    }
    return p[k_];
  }

  // Applies d to every node on the root-to-leaf path of row, stopping before `stop`.
  int apply_path(Tree& tree, const Bin* row, const Sums& d, int dn, int stop = -1) {
    int v = 0;
    while (v != stop) {
      TreeNode& node = tree.nodes[v];
      node.stats.apply(row, d, dn);
      touched_[v] = 1;
      if (node.is_leaf()) break;
      v = row[node.feature] <= node.threshold ? node.left : node.right;
    }
    return v;
  }

  void update_tree(int m, int k) {
    k_ = k;
    const int t = m * K_ + k;
    Tree& tree = model_.trees[t];
    auto& prob = st_.prob[t];
    auto& leaf = st_.leaf[t];
    touched_.assign(tree.nodes.size(), 0);
    dead_.assign(tree.nodes.size(), 0);
    new_leaves_.clear();
    int retrains = 0;

    for (auto id : batch_) {
      const Bin* row = st_.store.row_uncounted(id);
      const int label = st_.store.label(id);
      if (mode_ == UpdateMode::kAdd) {
        prob[id] = prob_start(id);
        leaf[id] = static_cast<std::uint16_t>(apply_path(tree, row, derivative_sums(label, k, prob[id]), 1));
      } else {
        apply_path(tree, row, derivative_sums(label, k, prob[id]).negated(), -1);
      }
    }

    if (opt_.policy == DerivativePolicy::kEager) {
      const std::size_t N = st_.store.size();
      for (std::uint32_t id = 0; id < N; ++id) {
        if (in_batch_[id] || !participates(id)) continue;
        double p = prob_start(id);
        if (same_bits(p, prob[id])) continue;
        const int label = st_.store.label(id);
        Sums d = derivative_sums(label, k, p) - derivative_sums(label, k, prob[id]);
        apply_path(tree, st_.store.row(id), d, 0);
        prob[id] = p;
        ++report_.derivative_writes;
      }
    }

    std::deque<int> queue{0};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      if (dead_[v] || !touched_[v]) continue;
      const TreeNode& node = tree.nodes[v];
      if (node.is_leaf()) continue;
      SplitRank r = current_split_rank(node);
      Decision d = r.rank > 0 && r.rank <= keep_budget(sigma_, r.n_candidates) ? Decision::kKeep : Decision::kRetrain;
      if (opt_.log_decisions) report_.log.push_back({t, node.depth, node.path, d, r.rank, r.n_candidates});
      if (d == Decision::kKeep) {
        queue.push_back(node.left);
        queue.push_back(node.right);
      } else {
        retrain(tree, t, m, v);
        ++retrains;
      }
    }

    if (sigma_ == 0 && !matches_regrowth(tree, model_.params.J)) {
      // Exact mode: a budget shift between subtrees is only caught by replaying the growth order.
      retrain(tree, t, m, 0);
      ++retrains;
      ++report_.regrowth_retrains;
    }

    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
      TreeNode& node = tree.nodes[v];
      if (dead_[v] || !node.is_leaf() || !touched_[v]) continue;
      ++report_.touched_leaves;
      double beta = leaf_value(from_fixed(node.stats.total.rp), from_fixed(node.stats.total.pp), K_);
      if (!same_bits(beta, node.beta)) {
        node.beta = beta;
        ++report_.changed_leaves;
      }
    }
    report_.changed_leaves += static_cast<std::int64_t>(new_leaves_.size());

    if (retrains > 0) compact(tree, leaf);
    report_.retrained_per_iteration[m] += retrains;
    report_.retrained_nodes += retrains;

    const double nu = model_.params.shrinkage;
    const std::size_t N = st_.store.size();
    for (std::uint32_t id = 0; id < N; ++id) {
      if (participates(id)) f_next_[static_cast<std::size_t>(id) * K_ + k] += nu * tree.nodes[leaf[id]].beta;
    }
  }

  void retrain(Tree& tree, int t, int m, int v) {
    auto& prob = st_.prob[t];
    auto& leaf = st_.leaf[t];
    std::vector<char> in_sub(tree.nodes.size(), 0);
    std::vector<int> stack{v};
    int budget = 0;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      in_sub[u] = 1;
      if (tree.nodes[u].is_leaf()) {
        ++budget;
      } else {
        stack.push_back(tree.nodes[u].left);
        stack.push_back(tree.nodes[u].right);
      }
    }

    std::vector<std::uint32_t> ids;
    const std::size_t N = st_.store.size();
    for (std::uint32_t id = 0; id < N; ++id) {
      if (participates(id) && in_sub[leaf[id]]) ids.push_back(id);
    }
    const int parent = tree.nodes[v].parent;
    for (auto id : ids) {
      if (in_batch_[id]) continue;
      double p = prob_start(id);
      if (same_bits(p, prob[id])) continue;
      if (parent >= 0) {
        const int label = st_.store.label(id);
        apply_path(tree, st_.store.row(id), derivative_sums(label, k_, p) - derivative_sums(label, k_, prob[id]), 0, v);
      }
      prob[id] = p;
      ++report_.derivative_writes;
    }

    if (v == 0) budget = model_.params.J;
    FitInput in{&st_.store, &n_bins_, prob.data(), k_, K_, model_.params.alpha,
                tree_seed(model_.params.seed, m, k_)};
    FitOutput out = fit_tree(in, std::move(ids), budget, tree.nodes[v].depth, tree.nodes[v].path);

    if (v == 0) {
      tree.nodes = std::move(out.nodes);
      touched_.assign(tree.nodes.size(), 0);
      dead_.assign(tree.nodes.size(), 0);
      new_leaves_.clear();
      for (std::uint32_t id = 0; id < N; ++id) leaf[id] = 0;
      for (std::size_t i = 0; i < out.ids.size(); ++i) leaf[out.ids[i]] = static_cast<std::uint16_t>(out.node_of[i]);
      for (std::size_t u = 0; u < tree.nodes.size(); ++u) {
        if (tree.nodes[u].is_leaf()) new_leaves_.push_back(static_cast<int>(u));
      }
      return;
    }

    for (std::size_t u = 0; u < in_sub.size(); ++u) {
      if (in_sub[u]) dead_[u] = 1;
    }
    new_leaves_.erase(std::remove_if(new_leaves_.begin(), new_leaves_.end(), [&](int u) { return dead_[u] != 0; }),
                      new_leaves_.end());
    const int base = static_cast<int>(tree.nodes.size());
    for (TreeNode& node : out.nodes) {
      if (node.left >= 0) node.left += base;
      if (node.right >= 0) node.right += base;
      node.parent = node.parent >= 0 ? node.parent + base : parent;
      tree.nodes.push_back(std::move(node));
    }
    TreeNode& p = tree.nodes[parent];
    (p.left == v ? p.left : p.right) = base;
    touched_.resize(tree.nodes.size(), 0);
    dead_.resize(tree.nodes.size(), 0);
    for (std::size_t u = base; u < tree.nodes.size(); ++u) {
      if (tree.nodes[u].is_leaf()) new_leaves_.push_back(static_cast<int>(u));
    }
    for (std::size_t i = 0; i < out.ids.size(); ++i) {
      leaf[out.ids[i]] = static_cast<std::uint16_t>(base + out.node_of[i]);
    }
  }

  // Drops dead nodes and renumbers the rest in preorder.
  void compact(Tree& tree, std::vector<std::uint16_t>& leaf) {
    std::vector<int> remap(tree.nodes.size(), -1);
    std::vector<TreeNode> kept;
    kept.reserve(tree.nodes.size());
    std::vector<int> stack{0};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      remap[u] = static_cast<int>(kept.size());
      kept.push_back(std::move(tree.nodes[u]));
      if (!kept.back().is_leaf()) {
        stack.push_back(kept.back().right);
        stack.push_back(kept.back().left);
      }
    }
    for (TreeNode& node : kept) {
      if (node.parent >= 0) node.parent = remap[node.parent];
      if (node.left >= 0) {
        node.left = remap[node.left];
        node.right = remap[node.right];
      }
    }
    tree.nodes = std::move(kept);
    for (std::size_t id = 0; id < leaf.size(); ++id) {
      int r = remap[leaf[id]];
      leaf[id] = static_cast<std::uint16_t>(r >= 0 ? r : 0);
    }
  }

  Model& model_;
  TrainingState& st_;
  const OnlineOptions& opt_;
  UpdateMode mode_;
  int K_;
  double sigma_;
  std::vector<std::uint32_t> batch_;
  std::vector<int> n_bins_;
  int k_ = 0;

  std::vector<char> in_batch_;
  // Scores at the start of the current iteration and after the trees updated so far.
  std::vector<double> f_start_, f_next_;
  std::vector<double> p_start_;
  std::vector<char> p_ready_;
  std::vector<char> touched_, dead_;
  std::vector<int> new_leaves_;
  UpdateReport report_;
};

void require_online(const Model& model) {
  if (!model.online_capable()) {
    throw OnlineError("model was exported without training statistics; online updates need a full export");
  }
}

}  // namespace

std::vector<std::uint32_t> invalid_delete_ids(const Model& model, const std::vector<std::uint32_t>& ids) {
  std::vector<std::uint32_t> bad;
  std::unordered_set<std::uint32_t> seen;
  for (auto id : ids) {
    bool ok = model.state && model.state->store.alive(id) && seen.insert(id).second;
    if (!ok) bad.push_back(id);
  }
  return bad;
}

UpdateReport incremental_learn(Model& model, const BinnedDataset& rows, const OnlineOptions& opt) {
  require_online(model);
  if (rows.n_features != model.n_features) {
    throw DataError("dimension mismatch: model expects " + std::to_string(model.n_features) + " features, batch has " +
                    std::to_string(rows.n_features));
  }
  for (int label : rows.labels) {
    if (label < 0 || label >= model.n_classes) throw DataError("unknown label value " + std::to_string(label));
  }
  TrainingState& st = *model.state;
  std::vector<std::uint32_t> ids;
  ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back(st.store.append(rows.labels[i], rows.row(i)));
  if (ids.empty()) {
    UpdateReport r;
    r.retrained_per_iteration.assign(model.n_iterations(), 0);
    r.iteration_us.assign(model.n_iterations(), 0.0);
    return r;
  }
  for (auto& p : st.prob) p.resize(st.store.size(), 0.0);
  for (auto& l : st.leaf) l.resize(st.store.size(), 0);
  st.score.resize(st.store.size() * model.n_classes, 0.0);
  return Updater(model, opt, UpdateMode::kAdd, std::move(ids)).run();
}

UpdateReport incremental_learn(Model& model, const RawDataset& rows, const OnlineOptions& opt) {
  require_online(model);
  return incremental_learn(model, apply_bins(rows, model.mapper), opt);
}

UpdateReport decremental_learn(Model& model, const std::vector<std::uint32_t>& ids, const OnlineOptions& opt) {
  require_online(model);
  auto bad = invalid_delete_ids(model, ids);
  if (!bad.empty()) {
    std::string msg = "cannot delete unknown or repeated instance ids:";
    for (std::size_t i = 0; i < bad.size() && i < 20; ++i) msg += " " + std::to_string(bad[i]);
    if (bad.size() > 20) msg += " ... (" + std::to_string(bad.size()) + " total)";
    throw DataError(msg);
  }
  if (ids.empty()) {
    UpdateReport r;
    r.mode = UpdateMode::kDelete;
    r.retrained_per_iteration.assign(model.n_iterations(), 0);
    r.iteration_us.assign(model.n_iterations(), 0.0);
    return r;
  }
  return Updater(model, opt, UpdateMode::kDelete, ids).run();
}

std::string report_json(const UpdateReport& r, bool with_log) {
  nlohmann::ordered_json j;
  j["mode"] = r.mode == UpdateMode::kAdd ? "add" : "delete";
  j["batch_size"] = r.batch_size;
  j["retrained_nodes"] = r.retrained_nodes;
  j["regrowth_retrains"] = r.regrowth_retrains;
  j["retrained_per_iteration"] = r.retrained_per_iteration;
  j["touched_leaves"] = r.touched_leaves;
  j["changed_leaves"] = r.changed_leaves;
  j["derivative_writes"] = r.derivative_writes;
  j["training_row_reads"] = r.training_row_reads;
  j["wall_us"] = r.wall_us;
  j["iteration_us"] = r.iteration_us;
  if (r.mode == UpdateMode::kAdd) j["assigned_ids"] = r.ids;
  if (with_log) {
    auto& log = j["decisions"] = nlohmann::ordered_json::array();
    for (const auto& e : r.log) {
      log.push_back({{"tree", e.tree},
                     {"depth", e.depth},
                     {"path", e.path},
                     {"decision", e.decision == Decision::kKeep ? "keep" : "retrain"},
                     {"rank", e.rank},
                     {"candidates", e.n_candidates}});
    }
  }
  return j.dump(2);
}

}  // namespace onlineboost
