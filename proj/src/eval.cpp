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

#include "onlineboost/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace onlineboost {

namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::ordered_json;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Uniform in [0, 1) from the top 53 bits, identical on every standard library.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

std::size_t bounded(std::mt19937_64& rng, std::size_t span) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * span) >> 64);
}

double accuracy(const Model& m, const RawDataset& test) { return 1.0 - m.error_rate(test); }

RawDataset concat(const RawDataset& a, const RawDataset& b) {
  RawDataset out = a;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.values.insert(out.values.end(), b.values.begin(), b.values.end());
  out.n_classes = std::max(a.n_classes, b.n_classes);
  return out;
}

std::vector<std::uint32_t> as_ids(const std::vector<std::size_t>& rows) {
  return {rows.begin(), rows.end()};
}

}  // namespace

RawDataset make_blobs(std::size_t n, int n_features, int n_classes, double center_spread, std::uint64_t seed) {
  if (n == 0 || n_features < 1 || n_classes < 2) throw std::invalid_argument("make_blobs: bad dimensions");
  std::mt19937_64 rng(seed);
  std::vector<double> centers(static_cast<std::size_t>(n_classes) * n_features);
  for (double& c : centers) c = (2.0 * unit(rng) - 1.0) * center_spread;
  RawDataset ds;
  ds.n_features = n_features;
  ds.n_classes = n_classes;
  std::vector<double> x(n_features);
  for (std::size_t i = 0; i < n; ++i) {
    int y = static_cast<int>(bounded(rng, n_classes));
    for (int f = 0; f < n_features; ++f) {
      // Box-Muller keeps the draw reproducible across standard libraries.
      double u1 = 1.0 - unit(rng), u2 = unit(rng);
      double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      x[f] = centers[static_cast<std::size_t>(y) * n_features + f] + z;
    }
    ds.add_row(y, x);
  }
  return ds;
}

RowSplit random_split(std::size_t n, std::size_t take, std::uint64_t seed) {
  if (take > n) throw std::invalid_argument("random_split: batch larger than data");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) std::swap(perm[i], perm[i + bounded(rng, n - i)]);
  RowSplit s;
  s.take.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(take));
  s.rest.assign(perm.begin() + static_cast<std::ptrdiff_t>(take), perm.end());
  std::sort(s.take.begin(), s.take.end());
  std::sort(s.rest.begin(), s.rest.end());
  return s;
}

std::size_t batch_count(double spec, std::size_t n) {
  if (!(spec > 0)) throw std::invalid_argument("batch size must be positive");
  std::size_t b = spec >= 1 ? static_cast<std::size_t>(spec) : static_cast<std::size_t>(std::llround(spec * n));
  b = std::max<std::size_t>(b, 1);
  if (b >= n) throw std::invalid_argument("batch size must leave at least one row");
  return b;
}

SimilarityReport functional_similarity(const std::vector<int>& a, const std::vector<int>& b,
                                       const std::vector<int>& truth) {
  if (truth.empty()) throw std::invalid_argument("functional similarity needs a non-empty test set");
  if (a.size() != truth.size() || b.size() != truth.size()) throw std::invalid_argument("prediction size mismatch");
  std::size_t c2w = 0, w2c = 0, w2w = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    bool ca = a[i] == truth[i], cb = b[i] == truth[i];
    if (ca && !cb) ++c2w;
    if (!ca && cb) ++w2c;
    if (!ca && !cb && a[i] != b[i]) ++w2w;
  }
  SimilarityReport r;
  const double n = static_cast<double>(truth.size());
  r.n = truth.size();
  r.c2w = static_cast<double>(c2w) / n;
  r.w2c = static_cast<double>(w2c) / n;
  r.w2w = static_cast<double>(w2w) / n;
  r.phi = 1.0 - static_cast<double>(c2w + w2c + w2w) / n;
  return r;
}

SimilarityReport functional_similarity(const Model& a, const Model& b, const RawDataset& test) {
  if (a.n_features != b.n_features || a.n_classes != b.n_classes) {
    throw std::invalid_argument("models differ in feature space or class count");
  }
  return functional_similarity(a.predict_labels(test), b.predict_labels(test), test.labels);
}

LeafErrorReport leaf_score_error(const Model& online, const Model& ref) {
  if (online.trees.size() != ref.trees.size()) throw std::invalid_argument("structure mismatch: tree count differs");
  LeafErrorReport r;
  for (std::size_t t = 0; t < online.trees.size(); ++t) {
    const auto& a = online.trees[t].nodes;
    const auto& b = ref.trees[t].nodes;
    if (a.size() != b.size()) throw std::invalid_argument("structure mismatch in tree " + std::to_string(t));
    for (std::size_t v = 0; v < a.size(); ++v) {
      if (a[v].left != b[v].left || a[v].right != b[v].right || a[v].feature != b[v].feature ||
          a[v].threshold != b[v].threshold) {
        throw std::invalid_argument("structure mismatch in tree " + std::to_string(t));
      }
      if (!a[v].is_leaf()) continue;
      r.sum_abs_diff += std::abs(a[v].beta - b[v].beta);
      r.sum_abs_ref += std::abs(b[v].beta);
      ++r.n_leaves;
    }
  }
  r.error = r.sum_abs_ref > 0 ? r.sum_abs_diff / r.sum_abs_ref : 0.0;
  return r;
}

Model refit_leaves(const Model& model) {
  if (!model.online_capable()) throw std::invalid_argument("refit needs a model with training state");
  Model ref = model;
  const TrainingState& st = *model.state;
  const int K = model.n_classes;
  const std::vector<std::uint32_t> ids = st.store.live_ids();
  const std::size_t n = ids.size();
  std::vector<double> F(n * K, 0.0), p(n * K);
  std::vector<int> leaf(n);
  for (int m = 0; m < model.n_iterations(); ++m) {
    for (std::size_t i = 0; i < n; ++i) softmax_row(&F[i * K], K, &p[i * K]);
    for (int k = 0; k < K; ++k) {
      Tree& tree = ref.trees[static_cast<std::size_t>(m) * K + k];
      std::vector<Sums> sums(tree.nodes.size());
      for (std::size_t i = 0; i < n; ++i) {
        leaf[i] = tree.route(st.store.row_uncounted(ids[i]));
        sums[leaf[i]] += derivative_sums(st.store.label(ids[i]), k, p[i * K + k]);
      }
      for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
        if (tree.nodes[v].is_leaf()) tree.nodes[v].beta = leaf_value(from_fixed(sums[v].rp), from_fixed(sums[v].pp), K);
      }
      for (std::size_t i = 0; i < n; ++i) F[i * K + k] += model.params.shrinkage * tree.nodes[leaf[i]].beta;
    }
  }
  return ref;
}

RawDataset apply_trigger(const RawDataset& data, const std::vector<int>& features, const std::vector<double>& values,
                         int target_label) {
  if (features.size() != values.size()) throw std::invalid_argument("trigger features and values differ in length");
  RawDataset out = data;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) out.values[i * out.n_features + features[j]] = values[j];
    out.labels[i] = target_label;
  }
  return out;
}

const PhaseResult& BackdoorReport::phase(const std::string& name) const {
  for (const auto& p : phases) {
    if (p.phase == name) return p;
  }
  throw std::out_of_range("no phase " + name);
}

BackdoorReport run_backdoor_experiment(const RawDataset& train_set, const RawDataset& test, const HyperParams& params,
                                       const BackdoorConfig& cfg) {
  if (!(cfg.poison_fraction >= 0 && cfg.poison_fraction < 1)) throw std::invalid_argument("poison fraction must be in [0, 1)");
  if (cfg.target_label < 0 || cfg.target_label >= train_set.n_classes) throw std::invalid_argument("target label out of range");
  for (int f : cfg.trigger_features) {
    if (f < 0 || f >= train_set.n_features) throw std::invalid_argument("trigger feature out of range");
  }
  std::vector<double> values = cfg.trigger_values;
  if (values.empty()) {
    for (int f : cfg.trigger_features) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < train_set.size(); ++i) mx = std::max(mx, train_set.row(i)[f]);
      values.push_back(mx);
    }
  }
  const RawDataset triggered_test = apply_trigger(test, cfg.trigger_features, values, cfg.target_label);

  BackdoorReport rep;
  rep.n_train = train_set.size();
  rep.n_poison = static_cast<std::size_t>(std::llround(cfg.poison_fraction * static_cast<double>(train_set.size())));
  RowSplit pick = random_split(train_set.size(), rep.n_poison, cfg.seed);
  if (rep.n_poison > 0 && std::all_of(pick.take.begin(), pick.take.end(), [&](std::size_t r) {
        return train_set.labels[r] == cfg.target_label;
      })) {
    throw std::invalid_argument("degenerate poison set: every poisoned row already has the target label");
  }
  const RawDataset poison = apply_trigger(train_set.subset(pick.take), cfg.trigger_features, values, cfg.target_label);

  auto record = [&](const std::string& name, const Model& m, double secs) {
    rep.phases.push_back({name, accuracy(m, test), accuracy(m, triggered_test), secs});
  };

  auto t0 = Clock::now();
  Model clean = train(train_set, params);
  record("Train Clean", clean, seconds_since(t0));

  t0 = Clock::now();
  Model backdoor = train(concat(train_set, poison), params);
  record("Train Backdoor", backdoor, seconds_since(t0));

  t0 = Clock::now();
  if (rep.n_poison > 0) incremental_learn(clean, poison, cfg.online);
  record("Add Backdoor", clean, seconds_since(t0));

  std::vector<std::uint32_t> ids(rep.n_poison);
  for (std::size_t i = 0; i < rep.n_poison; ++i) ids[i] = static_cast<std::uint32_t>(train_set.size() + i);
  t0 = Clock::now();
  if (rep.n_poison > 0) decremental_learn(backdoor, ids, cfg.online);
  record("Remove Backdoor", backdoor, seconds_since(t0));
  return rep;
}

ScheduleConfig ramp_schedule(int n_parts) {
  ScheduleConfig cfg;
  cfg.n_parts = n_parts;
  cfg.initial_parts = {0};
  for (int p = 1; p < n_parts; ++p) cfg.steps.push_back({StepOp::kAdd, p});
  for (int p = n_parts - 1; p >= 1; --p) cfg.steps.push_back({StepOp::kDelete, p});
  return cfg;
}

std::vector<std::vector<std::size_t>> schedule_partitions(std::size_t n, int n_parts, std::uint64_t seed) {
  if (n_parts < 1 || static_cast<std::size_t>(n_parts) > n) throw std::invalid_argument("bad partition count");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) std::swap(order[i], order[i + bounded(rng, n - i)]);
  std::vector<std::vector<std::size_t>> parts(n_parts);
  for (std::size_t i = 0; i < n; ++i) parts[i * n_parts / n].push_back(order[i]);
  for (auto& p : parts) std::sort(p.begin(), p.end());
  return parts;
}

std::vector<SchedulePoint> run_batch_schedule(const RawDataset& train_set, const RawDataset& test,
                                              const HyperParams& params, const ScheduleConfig& cfg) {
  const int P = cfg.n_parts;
  if (P < 1 || static_cast<std::size_t>(P) > train_set.size()) throw std::invalid_argument("bad partition count");
  auto check_part = [&](int p) {
    if (p < 0 || p >= P) throw std::invalid_argument("schedule references unknown partition " + std::to_string(p));
  };
  for (int p : cfg.initial_parts) check_part(p);
  for (const auto& s : cfg.steps) check_part(s.part);
  if (cfg.initial_parts.empty()) throw std::invalid_argument("schedule needs at least one initial partition");

  const auto parts = schedule_partitions(train_set.size(), P, cfg.seed);

  std::vector<char> present(P, 0);
  std::vector<std::vector<std::uint32_t>> ids(P);
  std::vector<std::size_t> rows;
  for (int p : cfg.initial_parts) {
    if (present[p]) throw std::invalid_argument("partition " + std::to_string(p) + " listed twice");
    present[p] = 1;
  }
  for (int p = 0; p < P; ++p) {
    if (!present[p]) continue;
    for (std::size_t r : parts[p]) {
      ids[p].push_back(static_cast<std::uint32_t>(rows.size()));
      rows.push_back(r);
    }
  }
  Model model = train(train_set.subset(rows), params);

  auto current_rows = [&]() {
    std::vector<std::size_t> cur;
    for (int p = 0; p < P; ++p) {
      if (present[p]) cur.insert(cur.end(), parts[p].begin(), parts[p].end());
    }
    return cur;
  };
  std::vector<SchedulePoint> out;
  auto record = [&](const std::string& label, double secs, int retrains) {
    SchedulePoint pt;
    pt.step = label;
    auto cur = current_rows();
    pt.n_rows = cur.size();
    pt.online_accuracy = accuracy(model, test);
    pt.online_seconds = secs;
    pt.retrained_nodes = retrains;
    if (cfg.retrain_reference) pt.retrain_accuracy = accuracy(train(train_set.subset(cur), params), test);
    out.push_back(pt);
  };
  record("initial", 0.0, 0);

  for (const auto& s : cfg.steps) {
    auto t0 = Clock::now();
    UpdateReport rep;
    if (s.op == StepOp::kAdd) {
      if (present[s.part]) throw std::invalid_argument("partition " + std::to_string(s.part) + " is already present");
      rep = incremental_learn(model, train_set.subset(parts[s.part]), cfg.online);
      ids[s.part] = rep.ids;
      present[s.part] = 1;
    } else {
      if (!present[s.part]) throw std::invalid_argument("partition " + std::to_string(s.part) + " is not present");
      rep = decremental_learn(model, ids[s.part], cfg.online);
      ids[s.part].clear();
      present[s.part] = 0;
    }
    record((s.op == StepOp::kAdd ? "add " : "delete ") + std::to_string(s.part), seconds_since(t0),
           rep.retrained_nodes);
  }
  return out;
}

std::vector<SpeedupRow> benchmark_speedup(const RawDataset& train_set, const HyperParams& params,
                                          const std::vector<double>& sizes, std::uint64_t seed,
                                          const OnlineOptions& online) {
  auto t0 = Clock::now();
  const Model full = train(train_set, params);
  const double retrain_s = seconds_since(t0);
  std::vector<SpeedupRow> rows;
  for (double spec : sizes) {
    SpeedupRow r;
    r.size_spec = spec;
    r.batch = batch_count(spec, train_set.size());
    r.retrain_seconds = retrain_s;
    RowSplit split = random_split(train_set.size(), r.batch, seed);

    Model base = train(train_set.subset(split.rest), params);
    RawDataset batch = train_set.subset(split.take);
    t0 = Clock::now();
    r.add_retrains = incremental_learn(base, batch, online).retrained_nodes;
    r.add_seconds = seconds_since(t0);

    Model copy = full;
    t0 = Clock::now();
    r.delete_retrains = decremental_learn(copy, as_ids(split.take), online).retrained_nodes;
    r.delete_seconds = seconds_since(t0);

    r.add_speedup = retrain_s / r.add_seconds;
    r.delete_speedup = retrain_s / r.delete_seconds;
    rows.push_back(r);
  }
  return rows;
}

OnlineVsRetrain compare_online_to_retrain(const RawDataset& train_set, const RawDataset& test,
                                          const HyperParams& params, double size_spec, std::uint64_t seed,
                                          const OnlineOptions& online) {
  OnlineVsRetrain r;
  r.size_spec = size_spec;
  r.batch = batch_count(size_spec, train_set.size());
  RowSplit split = random_split(train_set.size(), r.batch, seed);

  Model full = train(train_set, params);
  const auto full_pred = full.predict_labels(test);
  Model rest = train(train_set.subset(split.rest), params);
  const auto rest_pred = rest.predict_labels(test);
  auto error_of = [&](const std::vector<int>& pred) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != test.labels[i] ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(pred.size());
  };
  r.base_error = r.add_retrain_error = error_of(full_pred);
  r.delete_retrain_error = error_of(rest_pred);

  incremental_learn(rest, train_set.subset(split.take), online);
  const auto add_pred = rest.predict_labels(test);
  r.add_error = error_of(add_pred);
  r.add_similarity = functional_similarity(add_pred, full_pred, test.labels);

  decremental_learn(full, as_ids(split.take), online);
  const auto del_pred = full.predict_labels(test);
  r.delete_error = error_of(del_pred);
  r.delete_similarity = functional_similarity(del_pred, rest_pred, test.labels);
  return r;
}

namespace {

Json similarity_json(const SimilarityReport& r) {
  return Json{{"n", r.n}, {"c2w", r.c2w}, {"w2c", r.w2c}, {"w2w", r.w2w}, {"phi", r.phi}};
}

}  // namespace

std::string to_json(const SimilarityReport& r) { return similarity_json(r).dump(2); }

std::string to_json(const LeafErrorReport& r) {
  return Json{{"error", r.error}, {"sum_abs_diff", r.sum_abs_diff}, {"sum_abs_ref", r.sum_abs_ref}, {"leaves", r.n_leaves}}
      .dump(2);
}

std::string to_json(const BackdoorReport& r) {
  Json j;
  j["train_rows"] = r.n_train;
  j["poison_rows"] = r.n_poison;
  j["phases"] = Json::array();
  for (const auto& p : r.phases) {
    j["phases"].push_back(
        {{"phase", p.phase}, {"clean_accuracy", p.clean_accuracy}, {"asr", p.asr}, {"seconds", p.seconds}});
  }
  return j.dump(2);
}

std::string to_json(const std::vector<SchedulePoint>& r) {
  Json j = Json::array();
  for (const auto& p : r) {
    Json e{{"step", p.step},
           {"rows", p.n_rows},
           {"online_accuracy", p.online_accuracy},
           {"online_seconds", p.online_seconds},
           {"retrained_nodes", p.retrained_nodes}};
    if (p.retrain_accuracy >= 0) e["retrain_accuracy"] = p.retrain_accuracy;
    j.push_back(e);
  }
  return j.dump(2);
}

std::string to_json(const std::vector<SpeedupRow>& r) {
  Json j = Json::array();
  for (const auto& s : r) {
    j.push_back({{"size", s.size_spec},
                 {"batch", s.batch},
                 {"retrain_seconds", s.retrain_seconds},
                 {"add_seconds", s.add_seconds},
                 {"delete_seconds", s.delete_seconds},
                 {"add_speedup", s.add_speedup},
                 {"delete_speedup", s.delete_speedup},
                 {"add_retrains", s.add_retrains},
                 {"delete_retrains", s.delete_retrains}});
  }
  return j.dump(2);
}

std::string to_json(const OnlineVsRetrain& r) {
  Json j{{"size", r.size_spec},
         {"batch", r.batch},
         {"base_error", r.base_error},
         {"add_error", r.add_error},
         {"delete_error", r.delete_error},
         {"add_retrain_error", r.add_retrain_error},
         {"delete_retrain_error", r.delete_retrain_error}};
  j["add_similarity"] = similarity_json(r.add_similarity);
  j["delete_similarity"] = similarity_json(r.delete_similarity);
  return j.dump(2);
}

std::string to_csv(const BackdoorReport& r) {
  std::ostringstream os;
  os << "phase,clean_accuracy,asr,seconds\n";
  for (const auto& p : r.phases) os << p.phase << ',' << p.clean_accuracy << ',' << p.asr << ',' << p.seconds << '\n';
  return os.str();
}

std::string to_csv(const std::vector<SchedulePoint>& r) {
  std::ostringstream os;
  os << "step,rows,online_accuracy,retrain_accuracy,online_seconds,retrained_nodes\n";
  for (const auto& p : r) {
    os << p.step << ',' << p.n_rows << ',' << p.online_accuracy << ',';
    if (p.retrain_accuracy >= 0) os << p.retrain_accuracy;
    os << ',' << p.online_seconds << ',' << p.retrained_nodes << '\n';
  }
  return os.str();
}

std::string to_csv(const std::vector<SpeedupRow>& r) {
  std::ostringstream os;
  os << "size,batch,retrain_seconds,add_seconds,delete_seconds,add_speedup,delete_speedup\n";
  for (const auto& s : r) {
    os << s.size_spec << ',' << s.batch << ',' << s.retrain_seconds << ',' << s.add_seconds << ',' << s.delete_seconds
       << ',' << s.add_speedup << ',' << s.delete_speedup << '\n';
  }
  return os.str();
}

std::string schedule_svg(const std::vector<SchedulePoint>& r) {
  const double W = 640, H = 360, L = 60, R = 20, T = 20, B = 50;
  double lo = 1, hi = 0;
  for (const auto& p : r) {
    lo = std::min(lo, p.online_accuracy);
    hi = std::max(hi, p.online_accuracy);
    if (p.retrain_accuracy >= 0) {
      lo = std::min(lo, p.retrain_accuracy);
      hi = std::max(hi, p.retrain_accuracy);
    }
  }
  if (r.empty()) lo = 0, hi = 1;
  if (hi - lo < 1e-3) lo -= 5e-4, hi += 5e-4;
  const double span = std::max<double>(1, static_cast<double>(r.size()) - 1);
  auto x = [&](std::size_t i) { return L + (W - L - R) * static_cast<double>(i) / span; };
  auto y = [&](double a) { return T + (H - T - B) * (hi - a) / (hi - lo); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << 4 << "\" y=\"" << T + 10 << "\" font-size=\"11\">" << hi << "</text>\n";
  os << "<text x=\"" << 4 << "\" y=\"" << H - B << "\" font-size=\"11\">" << lo << "</text>\n";
  os << "<text x=\"" << W / 2 - 30 << "\" y=\"" << H - 15 << "\" font-size=\"12\">schedule step</text>\n";
  auto polyline = [&](bool online, const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < r.size(); ++i) {
      double a = online ? r[i].online_accuracy : r[i].retrain_accuracy;
      if (a < 0) continue;
      os << x(i) << ',' << y(a) << ' ';
    }
    os << "\"/>\n";
  };
  polyline(true, "#1f77b4");
  bool has_ref = std::any_of(r.begin(), r.end(), [](const SchedulePoint& p) { return p.retrain_accuracy >= 0; });
  if (has_ref) polyline(false, "#d62728");
  os << "<text x=\"" << W - 160 << "\" y=\"" << T + 12 << "\" font-size=\"12\" fill=\"#1f77b4\">online</text>\n";
  if (has_ref) os << "<text x=\"" << W - 100 << "\" y=\"" << T + 12 << "\" font-size=\"12\" fill=\"#d62728\">retrain</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace onlineboost
