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

#include "onlineboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace onlineboost {

void HyperParams::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (M < 1) fail("iterations must be >= 1");
  if (J < 2 || J > 4096) fail("leaves must be in [2, 4096]");
  if (B < 2 || B > 65536) fail("bins must be in [2, 65536]");
  if (!(shrinkage > 0 && shrinkage <= 1)) fail("shrinkage must be in (0, 1]");
  if (!(alpha > 0 && alpha <= 1)) fail("alpha must be in (0, 1]");
  if (!(sigma >= 0 && sigma <= 1)) fail("sigma must be in [0, 1]");
}

Sums derivative_sums(int label, int k, double p) {
  double r = label == k ? 1.0 : 0.0;
  return {to_fixed(r - p), to_fixed(p * (1.0 - p))};
}

void softmax_row(const double* F, int K, double* p) {
  double mx = F[0];
  for (int k = 1; k < K; ++k) mx = std::max(mx, F[k]);
  double sum = 0;
  for (int k = 0; k < K; ++k) {
    p[k] = std::exp(F[k] - mx);
    sum += p[k];
  }
  for (int k = 0; k < K; ++k) p[k] /= sum;
}

std::vector<double> softmax_row(const std::vector<double>& F) {
  std::vector<double> p(F.size());
  if (!F.empty()) softmax_row(F.data(), static_cast<int>(F.size()), p.data());
  return p;
}

Derivatives instance_derivatives(int label, const std::vector<double>& p) {
  Derivatives d;
  d.g.resize(p.size());
  d.h.resize(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    double r = static_cast<int>(k) == label ? 1.0 : 0.0;
    d.g[k] = -(r - p[k]);
    d.h[k] = p[k] * (1.0 - p[k]);
  }
  return d;
}

double nll_loss(const std::vector<int>& labels, const std::vector<double>& p, int K) {
  if (p.size() != labels.size() * static_cast<std::size_t>(K)) throw std::invalid_argument("nll_loss: size mismatch");
  double loss = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) loss -= std::log(p[i * K + labels[i]]);
  return loss;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(a ^ splitmix(b));
}

std::uint64_t tree_seed(std::uint64_t seed, int m, int k) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(k));
}

std::vector<Bin> sample_candidates(const std::vector<Bin>& present, double alpha, std::uint64_t rng_seed) {
  const std::size_t n = present.size();
  std::size_t want = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
  want = std::min(want, n);
  if (want == n) return present;
  std::vector<Bin> pool = present;
  std::mt19937_64 rng(rng_seed);
  for (std::size_t i = 0; i < want; ++i) {
    // Lemire's multiply-shift keeps the draw portable across standard libraries.
    std::uint64_t span = n - i;
    std::size_t j = i + static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * span) >> 64);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(want);
  std::sort(pool.begin(), pool.end());
  return pool;
}

namespace {

std::optional<Candidate> evaluate(double gl, double hl, double gr, double hr, double gt, double ht) {
  if (hl <= kEps || hr <= kEps) return std::nullopt;
  Candidate c;
  c.scale = gl * gl / hl + gr * gr / hr;
  c.gain = c.scale - gt * gt / ht;
  return c;
}

std::optional<Candidate> evaluate_fixed(const Sums& left, const Sums& total) {
  Sums right = total - left;
  // g = -(r - p); the sign cancels in every squared term.
  return evaluate(from_fixed(left.rp), from_fixed(left.pp), from_fixed(right.rp), from_fixed(right.pp),
                  from_fixed(total.rp), from_fixed(total.pp));
}

}  // namespace

std::optional<double> split_gain(double gl, double hl, double gt, double ht) {
  auto c = evaluate(gl, hl, gt - gl, ht - hl, gt, ht);
  if (!c) return std::nullopt;
  return c->gain;
}

bool prefer(const Candidate& a, const Candidate& b) {
  if (a.gain != b.gain) return a.gain > b.gain;
  if (a.feature != b.feature) return a.feature < b.feature;
  return a.bin < b.bin;
}

bool worth_splitting(const Candidate& c) { return c.gain > 1e-10 * c.scale && c.gain > 0; }

double leaf_value(double sum_rp, double sum_pp, int K) {
  if (sum_pp <= kEps) return 0.0;
  return (static_cast<double>(K - 1) / K) * (sum_rp / sum_pp);
}

int NodeStats::cell_of(int f, Bin b) const {
  auto first = cand.begin() + offset[f];
  auto last = cand.begin() + offset[f + 1];
  auto it = std::lower_bound(first, last, b);
  if (it == last) return -1;
  return static_cast<int>(it - cand.begin());
}

void NodeStats::apply(const Bin* row, const Sums& d, int dn) {
  total += d;
  n += dn;
  const int nf = n_features();
  for (int f = 0; f < nf; ++f) {
    int c = cell_of(f, row[f]);
    if (c >= 0) {
      cell[c] += d;
      count[c] += dn;
    }
  }
}

void NodeStats::clear_sums() {
  std::fill(cell.begin(), cell.end(), Sums{});
  std::fill(count.begin(), count.end(), 0);
  total = Sums{};
  n = 0;
}

bool NodeStats::operator==(const NodeStats& o) const {
  return offset == o.offset && cand == o.cand && cell == o.cell && count == o.count && total == o.total && n == o.n;
}

std::optional<SplitResult> find_best_split(const NodeStats& s, bool with_rank_table) {
  SplitResult res;
  bool found = false;
  const int nf = s.n_features();
  for (int f = 0; f < nf; ++f) {
    Sums left;
    for (std::uint32_t j = s.offset[f]; j < s.offset[f + 1]; ++j) {
      left += s.cell[j];
      if (s.count[j] == 0) continue;
      auto c = evaluate_fixed(left, s.total);
      if (!c) continue;
      c->feature = f;
      c->bin = s.cand[j];
      if (!found || prefer(*c, res.best)) res.best = *c;
      found = true;
      if (with_rank_table) res.rank_table.push_back(*c);
    }
  }
  if (!found) return std::nullopt;
  if (with_rank_table) std::sort(res.rank_table.begin(), res.rank_table.end(), prefer);
  return res;
}

std::optional<Candidate> candidate_gain(const NodeStats& s, int f, Bin threshold) {
  if (f < 0 || f >= s.n_features()) return std::nullopt;
  int c = s.cell_of(f, threshold);
  if (c < 0 || s.cand[c] != threshold || s.count[c] == 0) return std::nullopt;
  Sums left;
  for (int j = static_cast<int>(s.offset[f]); j <= c; ++j) left += s.cell[j];
  auto r = evaluate_fixed(left, s.total);
  if (!r) return std::nullopt;
  r->feature = f;
  r->bin = threshold;
  return r;
}

int Tree::route(const Bin* row) const {
  int v = 0;
  while (!nodes[v].is_leaf()) {
    const TreeNode& n = nodes[v];
    v = row[n.feature] <= n.threshold ? n.left : n.right;
  }
  return v;
}

int Tree::n_leaves() const {
  int c = 0;
  for (const auto& n : nodes) c += n.is_leaf() ? 1 : 0;
  return c;
}

std::uint32_t InstanceStore::append(int label, const Bin* row) {
  if (label < 0 || label >= n_classes_) throw DataError("unknown label value " + std::to_string(label));
  auto id = static_cast<std::uint32_t>(labels_.size());
  bins_.insert(bins_.end(), row, row + n_features_);
  labels_.push_back(label);
  alive_.push_back(1);
  ++live_;
  return id;
}

void InstanceStore::tombstone(std::uint32_t id) {
  if (!alive(id)) throw DataError("instance " + std::to_string(id) + " is not live");
  alive_[id] = 0;
  --live_;
}

std::vector<std::uint32_t> InstanceStore::live_ids() const {
  std::vector<std::uint32_t> ids;
  ids.reserve(live_);
  for (std::uint32_t i = 0; i < alive_.size(); ++i) {
    if (alive_[i]) ids.push_back(i);
  }
  return ids;
}

void InstanceStore::assign(std::vector<Bin> bins, std::vector<std::int32_t> labels, std::vector<std::uint8_t> alive) {
  bins_ = std::move(bins);
  labels_ = std::move(labels);
  alive_ = std::move(alive);
  live_ = static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), 1));
}

namespace {

struct Item {
  Sums d;
  std::uint32_t id;
};

struct BinHist {
  std::vector<Sums> s;
  std::vector<std::int32_t> c;
};

struct OpenLeaf {
  int node;
  std::size_t begin, end;
  BinHist hist;
  std::optional<Candidate> best;
};

bool node_ahead(const TreeNode& a, const Candidate& ga, const TreeNode& b, const Candidate& gb) {
  if (ga.gain != gb.gain) return ga.gain > gb.gain;
  if (a.depth != b.depth) return a.depth < b.depth;
  return a.path < b.path;
}

class Grower {
 public:
  explicit Grower(const FitInput& in) : in_(in) {
    const auto& nb = *in.n_bins;
    off_.resize(nb.size() + 1, 0);
    for (std::size_t f = 0; f < nb.size(); ++f) off_[f + 1] = off_[f] + static_cast<std::uint32_t>(nb[f]);
  }

  BinHist build(const std::vector<Item>& items, std::size_t b, std::size_t e) const {
    BinHist h;
    h.s.assign(off_.back(), Sums{});
    h.c.assign(off_.back(), 0);
    const int nf = static_cast<int>(off_.size()) - 1;
    for (std::size_t i = b; i < e; ++i) {
      const Bin* row = in_.store->row(items[i].id);
      for (int f = 0; f < nf; ++f) {
        std::uint32_t x = off_[f] + row[f];
        h.s[x] += items[i].d;
        ++h.c[x];
      }
    }
    return h;
  }

  static BinHist subtract(const BinHist& a, const BinHist& b) {
    BinHist h = a;
    for (std::size_t i = 0; i < h.s.size(); ++i) {
      h.s[i] -= b.s[i];
      h.c[i] -= b.c[i];
    }
    return h;
  }

  void make_stats(TreeNode& node, const BinHist& h, const Sums& total, std::int64_t n) const {
    const int nf = static_cast<int>(off_.size()) - 1;
    NodeStats& s = node.stats;
    s.offset.assign(nf + 1, 0);
    s.cand.clear();
    s.total = total;
    s.n = n;
    std::uint64_t node_seed = mix_seed(in_.tree_seed, node.path);
    std::vector<Bin> present;
    for (int f = 0; f < nf; ++f) {
      present.clear();
      for (std::uint32_t b = off_[f]; b < off_[f + 1]; ++b) {
        if (h.c[b] > 0) present.push_back(static_cast<Bin>(b - off_[f]));
      }
      if (!present.empty()) {
        auto c = sample_candidates(present, in_.alpha, mix_seed(node_seed, static_cast<std::uint64_t>(f)));
        s.cand.insert(s.cand.end(), c.begin(), c.end());
      }
      s.offset[f + 1] = static_cast<std::uint32_t>(s.cand.size());
    }
    s.cell.assign(s.cand.size(), Sums{});
    s.count.assign(s.cand.size(), 0);
    for (int f = 0; f < nf; ++f) {
      std::uint32_t j = s.offset[f];
      const std::uint32_t end = s.offset[f + 1];
      for (std::uint32_t b = off_[f]; b < off_[f + 1] && j < end; ++b) {
        Bin bin = static_cast<Bin>(b - off_[f]);
        while (j < end && s.cand[j] < bin) ++j;
        if (j == end) break;
        s.cell[j] += h.s[b];
        s.count[j] += h.c[b];
      }
    }
  }

 private:
  const FitInput& in_;
  std::vector<std::uint32_t> off_;
};

}  // namespace

FitOutput fit_tree(const FitInput& in, std::vector<std::uint32_t> ids, int budget, std::uint16_t depth,
                   std::uint64_t path) {
  Grower grower(in);
  std::vector<Item> items(ids.size());
  Sums root_total;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    items[i].id = ids[i];
    items[i].d = derivative_sums(in.store->label(ids[i]), in.k, in.prob[ids[i]]);
    root_total += items[i].d;
  }

  FitOutput out;
  out.nodes.emplace_back();
  out.nodes[0].depth = depth;
  out.nodes[0].path = path;

  std::vector<OpenLeaf> open;
  open.push_back({0, 0, items.size(), grower.build(items, 0, items.size()), std::nullopt});
  grower.make_stats(out.nodes[0], open[0].hist, root_total, static_cast<std::int64_t>(items.size()));
  if (auto r = find_best_split(out.nodes[0].stats)) open[0].best = r->best;

  int leaves = 1;
  while (leaves < budget) {
    int pick = -1;
    for (int i = 0; i < static_cast<int>(open.size()); ++i) {
      if (!open[i].best || !worth_splitting(*open[i].best)) continue;
      if (pick < 0 || node_ahead(out.nodes[open[i].node], *open[i].best, out.nodes[open[pick].node], *open[pick].best)) {
        pick = i;
      }
    }
    if (pick < 0) break;
    OpenLeaf leaf = std::move(open[pick]);
    open.erase(open.begin() + pick);
    const Candidate split = *leaf.best;

    auto mid_it = std::stable_partition(items.begin() + leaf.begin, items.begin() + leaf.end, [&](const Item& it) {
      return in.store->row(it.id)[split.feature] <= split.bin;
    });
    std::size_t mid = static_cast<std::size_t>(mid_it - items.begin());

    int parent = leaf.node;
    int li = static_cast<int>(out.nodes.size());
    int ri = li + 1;
    out.nodes.emplace_back();
    out.nodes.emplace_back();
    TreeNode& p = out.nodes[parent];
    p.feature = split.feature;
    p.threshold = split.bin;
    p.gain = split.gain;
    p.left = li;
    p.right = ri;
    for (int side = 0; side < 2; ++side) {
      TreeNode& c = out.nodes[side == 0 ? li : ri];
      c.parent = parent;
      c.depth = static_cast<std::uint16_t>(out.nodes[parent].depth + 1);
      c.path = child_path(out.nodes[parent].path, side);
    }

    OpenLeaf left{li, leaf.begin, mid, {}, std::nullopt};
    OpenLeaf right{ri, mid, leaf.end, {}, std::nullopt};
    if (mid - leaf.begin <= leaf.end - mid) {
      left.hist = grower.build(items, left.begin, left.end);
      right.hist = Grower::subtract(leaf.hist, left.hist);
    } else {
      right.hist = grower.build(items, right.begin, right.end);
      left.hist = Grower::subtract(leaf.hist, right.hist);
    }
    leaf.hist = {};
    for (OpenLeaf* c : {&left, &right}) {
      Sums tot;
      for (std::size_t i = c->begin; i < c->end; ++i) tot += items[i].d;
      grower.make_stats(out.nodes[c->node], c->hist, tot, static_cast<std::int64_t>(c->end - c->begin));
      if (auto r = find_best_split(out.nodes[c->node].stats)) c->best = r->best;
      open.push_back(std::move(*c));
    }
    ++leaves;
  }

  out.ids.resize(items.size());
  out.node_of.resize(items.size());
  for (const OpenLeaf& leaf : open) {
    TreeNode& node = out.nodes[leaf.node];
    node.beta = leaf_value(from_fixed(node.stats.total.rp), from_fixed(node.stats.total.pp), in.K);
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) {
      out.ids[i] = items[i].id;
      out.node_of[i] = leaf.node;
    }
  }
  return out;
}

std::vector<int> bin_counts(const BinMapper& mapper) {
  std::vector<int> nb(mapper.n_features());
  for (int f = 0; f < mapper.n_features(); ++f) nb[f] = mapper.n_bins(f);
  return nb;
}

Model train(const BinnedDataset& data, const BinMapper& mapper, const HyperParams& params) {
  params.validate();
  if (data.size() == 0) throw DataError("no rows");
  if (data.n_features != mapper.n_features()) throw DataError("feature count mismatch between data and bin mapper");
  const int K = std::max(2, data.n_classes);
  const std::size_t N = data.size();

  Model model;
  model.params = params;
  model.n_classes = K;
  model.n_features = data.n_features;
  model.mapper = mapper;
  model.state.emplace();
  TrainingState& st = *model.state;
  st.store = InstanceStore(data.n_features, K);
  for (std::size_t i = 0; i < N; ++i) st.store.append(data.labels[i], data.row(i));

  const std::vector<int> n_bins = bin_counts(mapper);
  const int T = params.M * K;
  model.trees.resize(T);
  st.prob.assign(T, std::vector<double>(N));
  st.leaf.assign(T, std::vector<std::uint16_t>(N));
  std::vector<double> F(N * K, 0.0), p(N * K);
  std::vector<std::uint32_t> ids = st.store.live_ids();

  for (int m = 0; m < params.M; ++m) {
    for (std::size_t i = 0; i < N; ++i) softmax_row(&F[i * K], K, &p[i * K]);
    for (int k = 0; k < K; ++k) {
      const int t = m * K + k;
      for (std::size_t i = 0; i < N; ++i) st.prob[t][i] = p[i * K + k];
      FitInput in{&st.store, &n_bins, st.prob[t].data(), k, K, params.alpha, tree_seed(params.seed, m, k)};
      FitOutput out = fit_tree(in, ids, params.J, 0, kRootPath);
      model.trees[t].nodes = std::move(out.nodes);
      for (std::size_t i = 0; i < out.ids.size(); ++i) st.leaf[t][out.ids[i]] = static_cast<std::uint16_t>(out.node_of[i]);
      const auto& nodes = model.trees[t].nodes;
      for (std::size_t i = 0; i < N; ++i) F[i * K + k] += params.shrinkage * nodes[st.leaf[t][i]].beta;
    }
  }
  st.score = std::move(F);
  return model;
}

Model train(const RawDataset& data, const HyperParams& params) {
  params.validate();
  BinMapper mapper = build_bin_mapper(data, params.B);
  return train(apply_bins(data, mapper), mapper, params);
}

void Model::raw_scores(const Bin* row, double* F) const {
  const int K = n_classes;
  std::fill(F, F + K, 0.0);
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const Tree& tree = trees[t];
    F[t % K] += params.shrinkage * tree.nodes[tree.route(row)].beta;
  }
}

Prediction Model::predict_binned(const Bin* row) const {
  std::vector<double> F(n_classes);
  raw_scores(row, F.data());
  Prediction pr;
  pr.prob.resize(n_classes);
  softmax_row(F.data(), n_classes, pr.prob.data());
  pr.label = static_cast<int>(std::max_element(pr.prob.begin(), pr.prob.end()) - pr.prob.begin());
  return pr;
}

Prediction Model::predict(const double* raw) const {
  std::vector<Bin> row(n_features);
  for (int f = 0; f < n_features; ++f) row[f] = mapper.map(f, raw[f]);
  return predict_binned(row.data());
}

std::vector<int> Model::predict_labels(const RawDataset& data) const {
  if (data.n_features != n_features) {
    throw DataError("dimension mismatch: model expects " + std::to_string(n_features) + " features, data has " +
                    std::to_string(data.n_features));
  }
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i)).label;
  return out;
}

double Model::error_rate(const RawDataset& data) const {
  if (data.size() == 0) throw DataError("no rows");
  auto pred = predict_labels(data);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) wrong += pred[i] != data.labels[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

}  // namespace onlineboost
