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

// Brute-force oracles shared by the unit, property and acceptance tests.

#ifndef ONLINEBOOST_TESTS_TEST_UTIL_HPP_
#define ONLINEBOOST_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "onlineboost/boosting.hpp"
#include "onlineboost/eval.hpp"

namespace onlineboost::testing {

// Small integer-valued dataset so that bins equal raw values.
inline RawDataset random_grid_data(std::size_t n, int n_features, int n_classes, int levels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RawDataset ds;
  ds.n_features = n_features;
  ds.n_classes = n_classes;
  std::vector<double> x(n_features);
  for (std::size_t i = 0; i < n; ++i) {
    int y = static_cast<int>(rng() % n_classes);
    for (int f = 0; f < n_features; ++f) {
      // Labels leak into the low features so that splits carry signal.
      int v = static_cast<int>(rng() % levels);
      if (f < 2 && rng() % 3 == 0) v = (y * levels) / n_classes;
      x[f] = v;
    }
    ds.add_row(y, x);
  }
  return ds;
}

inline BinnedDataset binned_subset(const BinnedDataset& d, const std::vector<std::size_t>& rows) {
  BinnedDataset out;
  out.n_features = d.n_features;
  out.n_classes = d.n_classes;
  for (auto r : rows) {
    out.labels.push_back(d.labels[r]);
    out.bins.insert(out.bins.end(), d.row(r), d.row(r) + d.n_features);
  }
  return out;
}

// Rebuilds every node's statistics of tree t from the live instances and the
// stored per-tree probabilities, then compares with the maintained ones.
// Returns an empty string on match, otherwise a description of the first mismatch.
inline std::string check_stats_from_scratch(const Model& model, std::size_t t) {
  const TrainingState& st = *model.state;
  const Tree& tree = model.trees[t];
  const int k = static_cast<int>(t % model.n_classes);
  std::vector<NodeStats> fresh(tree.nodes.size());
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    fresh[v] = tree.nodes[v].stats;
    fresh[v].clear_sums();
  }
  for (std::uint32_t id = 0; id < st.store.size(); ++id) {
    if (!st.store.alive(id)) continue;
    const Bin* row = st.store.row_uncounted(id);
    Sums d = derivative_sums(st.store.label(id), k, st.prob[t][id]);
    int v = 0;
    while (true) {
      NodeStats& s = fresh[v];
      s.total += d;
      s.n += 1;
      for (int f = 0; f < s.n_features(); ++f) {
        // Linear scan instead of the binary search used by the library.
        for (std::uint32_t j = s.offset[f]; j < s.offset[f + 1]; ++j) {
          if (row[f] <= s.cand[j]) {
            s.cell[j] += d;
            s.count[j] += 1;
            break;
          }
        }
      }
      const TreeNode& node = tree.nodes[v];
      if (node.is_leaf()) break;
      v = row[node.feature] <= node.threshold ? node.left : node.right;
    }
    if (st.leaf[t][id] != v) return "tree " + std::to_string(t) + ": stale leaf index for id " + std::to_string(id);
  }
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    if (!(fresh[v] == tree.nodes[v].stats)) return "tree " + std::to_string(t) + ": node " + std::to_string(v);
    const TreeNode& node = tree.nodes[v];
    if (node.is_leaf()) {
      double beta = leaf_value(from_fixed(fresh[v].total.rp), from_fixed(fresh[v].total.pp), model.n_classes);
      if (std::abs(beta - node.beta) > 1e-9 * std::max(1.0, std::abs(beta))) {
        return "tree " + std::to_string(t) + ": leaf value at node " + std::to_string(v);
      }
    }
  }
  return {};
}

inline std::string check_all_stats(const Model& model) {
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    std::string err = check_stats_from_scratch(model, t);
    if (!err.empty()) return err;
  }
  return {};
}

// Structural equality keyed by node path; leaf values within rel_tol.
inline std::string compare_models(const Model& a, const Model& b, double rel_tol) {
  if (a.trees.size() != b.trees.size()) return "tree count";
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    const auto& na = a.trees[t].nodes;
    const auto& nb = b.trees[t].nodes;
    if (na.size() != nb.size()) return "tree " + std::to_string(t) + ": node count";
    for (const auto& x : na) {
      const TreeNode* y = nullptr;
      for (const auto& c : nb) {
        if (c.path == x.path && c.depth == x.depth) y = &c;
      }
      if (!y) return "tree " + std::to_string(t) + ": missing node";
      if (x.is_leaf() != y->is_leaf() || x.feature != y->feature || x.threshold != y->threshold) {
        return "tree " + std::to_string(t) + ": split differs";
      }
      if (x.is_leaf() && std::abs(x.beta - y->beta) > rel_tol * std::max(std::abs(y->beta), 1e-300) &&
          x.beta != y->beta) {
        return "tree " + std::to_string(t) + ": leaf value differs";
      }
    }
  }
  return {};
}

// Direct double-precision evaluation of one split from per-instance derivatives.
struct BruteSplit {
  int feature = -1;
  int bin = -1;
  double gain = 0;
};

inline std::optional<BruteSplit> brute_best_split(const std::vector<const Bin*>& rows, const std::vector<double>& g,
                                                  const std::vector<double>& h, int n_features,
                                                  const std::vector<std::vector<int>>& candidates) {
  double gt = 0, ht = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    gt += g[i];
    ht += h[i];
  }
  std::optional<BruteSplit> best;
  for (int f = 0; f < n_features; ++f) {
    for (int c : candidates[f]) {
      double gl = 0, hl = 0;
      int nl = 0;
      bool present = false;
      int prev = -1;
      for (int d : candidates[f]) {
        if (d < c && d > prev) prev = d;
      }
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][f] <= c) {
          gl += g[i];
          hl += h[i];
          ++nl;
          if (rows[i][f] > prev) present = true;
        }
      }
      if (!present) continue;  // empty candidate cell
      double gr = gt - gl, hr = ht - hl;
      if (hl <= kEps || hr <= kEps) continue;
      double gain = gl * gl / hl + gr * gr / hr - gt * gt / ht;
      if (!best || gain > best->gain) best = BruteSplit{f, c, gain};
    }
  }
  return best;
}

// One random node: find_best_split against brute_best_split over the node's own
// candidates. Ties broken differently must still have equal gain.
inline std::string check_random_split(std::mt19937_64& rng) {
  const int nf = 1 + static_cast<int>(rng() % 4);
  const int levels = 2 + static_cast<int>(rng() % 12);
  const int n = 2 + static_cast<int>(rng() % 40);
  const int K = 2 + static_cast<int>(rng() % 3);
  InstanceStore store(nf, K);
  std::vector<double> prob(n);
  std::vector<Bin> row(nf);
  for (int i = 0; i < n; ++i) {
    for (int f = 0; f < nf; ++f) row[f] = static_cast<Bin>(rng() % levels);
    store.append(static_cast<int>(rng() % K), row.data());
    prob[i] = 0.02 + 0.96 * static_cast<double>(rng() % 1000) / 1000.0;
  }
  std::vector<int> n_bins(nf, levels);
  const double alpha = (rng() % 3 == 0) ? 1.0 : 0.3;
  FitInput in{&store, &n_bins, prob.data(), 0, K, alpha, rng()};
  FitOutput out = fit_tree(in, store.live_ids(), 1, 0, kRootPath);
  const NodeStats& s = out.nodes[0].stats;

  std::vector<const Bin*> rows;
  std::vector<double> g, h;
  for (int i = 0; i < n; ++i) {
    rows.push_back(store.row_uncounted(i));
    double r = store.label(i) == 0 ? 1.0 : 0.0;
    g.push_back(-(r - prob[i]));
    h.push_back(prob[i] * (1 - prob[i]));
  }
  std::vector<std::vector<int>> cands(nf);
  for (int f = 0; f < nf; ++f) {
    for (std::uint32_t j = s.offset[f]; j < s.offset[f + 1]; ++j) cands[f].push_back(s.cand[j]);
  }
  auto brute = brute_best_split(rows, g, h, nf, cands);
  auto got = find_best_split(s);
  if (brute.has_value() != got.has_value()) return "existence differs";
  if (!brute) return {};
  const double tol = 1e-9 * std::max(1.0, std::abs(brute->gain));
  if (std::abs(got->best.gain - brute->gain) > tol) return "best gain differs";
  if (got->best.feature != brute->feature || got->best.bin != brute->bin) {
    auto alt = candidate_gain(s, brute->feature, static_cast<Bin>(brute->bin));
    if (!alt || std::abs(alt->gain - got->best.gain) > tol) return "different split with unequal gain";
  }
  return {};
}

// With alpha = 1 every node's candidate set must equal the bins present among
// the instances reaching it.
inline std::string check_candidates_are_present_bins(const Model& m) {
  const auto& st = *m.state;
  const int nf = m.n_features;
  for (std::size_t t = 0; t < m.trees.size(); ++t) {
    const Tree& tree = m.trees[t];
    std::vector<std::vector<std::set<Bin>>> present(tree.nodes.size(), std::vector<std::set<Bin>>(nf));
    for (std::uint32_t id = 0; id < st.store.size(); ++id) {
      if (!st.store.alive(id)) continue;
      const Bin* row = st.store.row_uncounted(id);
      int v = 0;
      while (true) {
        for (int f = 0; f < nf; ++f) present[v][f].insert(row[f]);
        if (tree.nodes[v].is_leaf()) break;
        v = row[tree.nodes[v].feature] <= tree.nodes[v].threshold ? tree.nodes[v].left : tree.nodes[v].right;
      }
    }
    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
      const NodeStats& s = tree.nodes[v].stats;
      for (int f = 0; f < nf; ++f) {
        std::set<Bin> cand(s.cand.begin() + s.offset[f], s.cand.begin() + s.offset[f + 1]);
        if (cand != present[v][f]) {
          return "tree " + std::to_string(t) + " node " + std::to_string(v) + " feature " + std::to_string(f);
        }
      }
    }
  }
  return {};
}

}  // namespace onlineboost::testing

#endif  // ONLINEBOOST_TESTS_TEST_UTIL_HPP_
