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

// Command-line front end: train, add, delete, predict, export, eval, bench.
// Exit codes: 0 success, 2 usage or configuration error, 1 runtime error.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "onlineboost/boosting.hpp"
#include "onlineboost/data.hpp"
#include "onlineboost/eval.hpp"
#include "onlineboost/online.hpp"
#include "onlineboost/store.hpp"

namespace ob = onlineboost;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string data, test, out, model, rows, ids;
  std::string format = "csv";
  bool header = false;
  int label_column = 0;
  bool unlabeled = false;

  ob::HyperParams hp;
  std::string export_mode = "full";
  std::string policy = "lazy";
  std::optional<double> update_sigma;
  bool log_decisions = false;
  std::string report;

  std::string a, b;
  std::string dataset;
  std::string data_dir;
  double poison = 0.05;
  int target = 0;
  std::string trigger_features = "0,1,2";
  int parts = 20;
  double size = 0.001;
  std::string sizes = "1,0.001,0.01";
  std::size_t synthetic_rows = 50000;
  int synthetic_features = 20;
  int synthetic_classes = 2;
  bool no_reference = false;
  std::string json_out, csv_out, svg_out;
};

void add_load_flags(CLI::App* c, Options& o) {
  c->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"csv", "libsvm"}));
  c->add_flag("--header", o.header, "Skip the first CSV line");
  c->add_option("--label-column", o.label_column, "CSV label column; negative counts from the end");
}

void add_hyper_flags(CLI::App* c, Options& o) {
  c->add_option("--iters", o.hp.M, "Boosting iterations M");
  c->add_option("--leaves", o.hp.J, "Leaves per tree J");
  c->add_option("--bins", o.hp.B, "Maximum bins per feature B");
  c->add_option("--shrinkage", o.hp.shrinkage, "Shrinkage nu");
  c->add_option("--alpha", o.hp.alpha, "Split candidate sampling rate");
  c->add_option("--sigma", o.hp.sigma, "Split robustness tolerance");
  c->add_option("--seed", o.hp.seed, "Random seed (ONLINEBOOST_SEED overrides)");
}

void add_update_flags(CLI::App* c, Options& o) {
  c->add_option("--sigma", o.update_sigma, "Override the model's split robustness tolerance");
  c->add_option("--policy", o.policy, "Derivative refresh policy")->check(CLI::IsMember({"lazy", "eager"}));
  c->add_flag("--log-decisions", o.log_decisions, "Include per-node decisions in the report");
  c->add_option("--report", o.report, "Write the update report as JSON");
  c->add_option("--out", o.out, "Output model path (default: update in place)");
}

void add_dataset_flags(CLI::App* c, Options& o) {
  c->add_option("--dataset", o.dataset, "Dataset name under the data directory, or 'synthetic'");
  c->add_option("--data", o.data, "Training data file");
  c->add_option("--test", o.test, "Test data file");
  c->add_option("--data-dir", o.data_dir, "Directory holding <name>.train.csv and <name>.test.csv");
  c->add_option("--synthetic-rows", o.synthetic_rows, "Rows of generated training data");
  c->add_option("--synthetic-features", o.synthetic_features, "Features of generated data");
  c->add_option("--synthetic-classes", o.synthetic_classes, "Classes of generated data");
  c->add_option("--json", o.json_out, "Write the report as JSON");
  c->add_option("--csv", o.csv_out, "Write the report as CSV");
  add_load_flags(c, o);
  add_hyper_flags(c, o);
}

struct Commands {
  CLI::App* train;
  CLI::App* add;
  CLI::App* del;
  CLI::App* predict;
  CLI::App* exp;
  CLI::App* eval;
  CLI::App* backdoor;
  CLI::App* similarity;
  CLI::App* schedule;
  CLI::App* compare;
  CLI::App* bench;
  CLI::App* speedup;
};

Commands build(CLI::App& app, Options& o) {
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--config", o.config, "key=value file; command-line flags take precedence");
  Commands c{};

  c.train = app.add_subcommand("train", "Train a model from scratch");
  c.train->add_option("--data", o.data, "Training data")->required();
  c.train->add_option("--out", o.out, "Model output path")->required();
  c.train->add_option("--test", o.test, "Optional test data for reporting error");
  c.train->add_option("--export", o.export_mode, "Model export mode")->check(CLI::IsMember({"full", "slim"}));
  add_load_flags(c.train, o);
  add_hyper_flags(c.train, o);

  c.add = app.add_subcommand("add", "Learn new rows into a full model");
  c.add->add_option("--model", o.model, "Model file")->required();
  c.add->add_option("--rows", o.rows, "Rows to add")->required();
  add_load_flags(c.add, o);
  add_update_flags(c.add, o);

  c.del = app.add_subcommand("delete", "Remove learned instances from a full model");
  c.del->add_option("--model", o.model, "Model file")->required();
  c.del->add_option("--ids", o.ids, "File of instance ids separated by whitespace or commas")->required();
  add_update_flags(c.del, o);

  c.predict = app.add_subcommand("predict", "Write class probabilities and labels as CSV");
  c.predict->add_option("--model", o.model, "Model file")->required();
  c.predict->add_option("--data", o.data, "Rows to predict")->required();
  c.predict->add_option("--out", o.out, "Output CSV (default: stdout)");
  c.predict->add_flag("--unlabeled", o.unlabeled, "CSV rows contain features only");
  add_load_flags(c.predict, o);

  c.exp = app.add_subcommand("export", "Re-export a model, e.g. as a slim prediction-only file");
  c.exp->add_option("--model", o.model, "Model file")->required();
  c.exp->add_option("--out", o.out, "Output path")->required();
  c.exp->add_option("--export", o.export_mode, "Model export mode")->check(CLI::IsMember({"full", "slim"}));

  c.eval = app.add_subcommand("eval", "Verification experiments");
  c.eval->require_subcommand(1);
  c.backdoor = c.eval->add_subcommand("backdoor", "Inject and remove a backdoor");
  add_dataset_flags(c.backdoor, o);
  c.backdoor->add_option("--poison", o.poison, "Poisoned fraction of the training set");
  c.backdoor->add_option("--target", o.target, "Target label of the trigger");
  c.backdoor->add_option("--trigger-features", o.trigger_features, "Comma-separated features set by the trigger");

  c.similarity = c.eval->add_subcommand("similarity", "Functional similarity of two models on a test set");
  c.similarity->add_option("--a", o.a, "First model")->required();
  c.similarity->add_option("--b", o.b, "Second model")->required();
  c.similarity->add_option("--test", o.test, "Labelled test data")->required();
  c.similarity->add_option("--json", o.json_out, "Write the report as JSON");
  add_load_flags(c.similarity, o);

  c.schedule = c.eval->add_subcommand("schedule", "Ramp up by adding parts, then ramp down deleting them");
  add_dataset_flags(c.schedule, o);
  c.schedule->add_option("--parts", o.parts, "Number of equal parts");
  c.schedule->add_flag("--no-reference", o.no_reference, "Skip the retrain reference at each step");
  c.schedule->add_option("--svg", o.svg_out, "Write an accuracy plot");
  c.schedule->add_option("--policy", o.policy, "Derivative refresh policy")->check(CLI::IsMember({"lazy", "eager"}));

  c.compare = c.eval->add_subcommand("compare", "Online add/delete of a batch against retraining");
  add_dataset_flags(c.compare, o);
  c.compare->add_option("--size", o.size, "Batch size: count if >= 1, else fraction");
  c.compare->add_option("--policy", o.policy, "Derivative refresh policy")->check(CLI::IsMember({"lazy", "eager"}));

  c.bench = app.add_subcommand("bench", "Timing benchmarks");
  c.bench->require_subcommand(1);
  c.speedup = c.bench->add_subcommand("speedup", "Online add/delete time against retraining");
  add_dataset_flags(c.speedup, o);
  c.speedup->add_option("--sizes", o.sizes, "Comma-separated batch sizes: counts if >= 1, else fractions");
  c.speedup->add_option("--policy", o.policy, "Derivative refresh policy")->check(CLI::IsMember({"lazy", "eager"}));

  for (CLI::App* leaf : {c.train, c.add, c.del, c.predict, c.exp, c.backdoor, c.similarity, c.schedule, c.compare,
                         c.speedup}) {
    leaf->add_option("--config", o.config, "key=value file; command-line flags take precedence");
  }
  return c;
}

std::string trim(std::string s) {
  auto issp = [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

// key=value lines; '#' starts a comment; [section] headers are ignored.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ": line " + std::to_string(n) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    kv.emplace_back(key, value);
  }
  return kv;
}

std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

// Inserts config entries as flags right after the subcommand path so that
// later command-line flags win.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::string& config_path) {
  if (config_path.empty()) return args;
  auto kv = read_config(config_path);
  Options scratch;
  CLI::App probe;
  build(probe, scratch);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    probe.parse(rev);
  } catch (const CLI::ParseError&) {
    // Only the selected subcommand path matters here; the real parse reports errors.
  }

  const CLI::App* leaf = &probe;
  std::size_t depth = 0;
  while (true) {
    auto subs = leaf->get_subcommands();
    if (subs.empty()) break;
    leaf = subs.front();
    ++depth;
  }
  // Position after the last subcommand name on the command line.
  std::size_t pos = 0, seen = 0;
  const CLI::App* walk = &probe;
  for (std::size_t i = 0; i < args.size() && seen < depth; ++i) {
    auto subs = walk->get_subcommands();
    if (!subs.empty() && args[i] == subs.front()->get_name()) {
      walk = subs.front();
      ++seen;
      pos = i + 1;
    }
  }
  std::vector<std::string> injected;
  for (const auto& [key, value] : kv) {
    if (key == "config") continue;
    if (leaf->get_option_no_throw("--" + key) == nullptr) {
      throw UsageError(config_path + ": unknown key '" + key + "' for this command");
    }
    injected.push_back("--" + key + "=" + value);
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(pos));
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(pos), args.end());
  return out;
}

void apply_seed_env(Options& o) {
  const char* env = std::getenv("ONLINEBOOST_SEED");
  if (env == nullptr || *env == '\0') return;
  std::uint64_t v = 0;
  const char* end = env + std::strlen(env);
  auto [p, ec] = std::from_chars(env, end, v);
  if (ec != std::errc() || p != end) throw UsageError(std::string("ONLINEBOOST_SEED is not an unsigned integer: ") + env);
  o.hp.seed = v;
}

ob::LoadOptions load_options(const Options& o, int n_classes = 0) {
  ob::LoadOptions lo;
  lo.format = o.format == "libsvm" ? ob::Format::kLibsvm : ob::Format::kCsv;
  lo.header = o.header;
  lo.label_column = o.label_column;
  lo.n_classes = n_classes;
  lo.unlabeled = o.unlabeled;
  return lo;
}

ob::OnlineOptions online_options(const Options& o) {
  ob::OnlineOptions oo;
  oo.policy = o.policy == "eager" ? ob::DerivativePolicy::kEager : ob::DerivativePolicy::kLazy;
  oo.sigma = o.update_sigma;
  oo.log_decisions = o.log_decisions;
  if (oo.sigma && !(*oo.sigma >= 0 && *oo.sigma <= 1)) throw UsageError("sigma must be in [0, 1]");
  return oo;
}

void validate(const ob::HyperParams& hp) {
  try {
    hp.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  ob::write_file_atomic(path, text);
}

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

double mean_train_loss(const ob::Model& m) {
  const auto& st = *m.state;
  const int K = m.n_classes;
  double loss = 0;
  std::vector<double> p(K);
  auto ids = st.store.live_ids();
  for (auto id : ids) {
    ob::softmax_row(&st.score[static_cast<std::size_t>(id) * K], K, p.data());
    loss -= std::log(p[st.store.label(id)]);
  }
  return ids.empty() ? 0.0 : loss / static_cast<double>(ids.size());
}

struct Datasets {
  ob::RawDataset train;
  ob::RawDataset test;
  std::string name;
};

Datasets resolve_datasets(const Options& o, bool need_test) {
  Datasets d;
  if (o.dataset == "synthetic") {
    const std::size_t n = o.synthetic_rows;
    if (n < 10) throw UsageError("--synthetic-rows must be at least 10");
    auto all = ob::make_blobs(n + n / 4, o.synthetic_features, o.synthetic_classes, 1.0, o.hp.seed);
    std::vector<std::size_t> tr(n), te(n / 4);
    for (std::size_t i = 0; i < n; ++i) tr[i] = i;
    for (std::size_t i = 0; i < te.size(); ++i) te[i] = n + i;
    d.train = all.subset(tr);
    d.test = all.subset(te);
    d.name = "synthetic";
    return d;
  }
  std::string train_path = o.data, test_path = o.test;
  if (!o.dataset.empty()) {
    std::string dir = o.data_dir;
    if (dir.empty()) {
      const char* env = std::getenv("ONLINEBOOST_DATA_DIR");
      dir = env ? env : "data";
    }
    train_path = dir + "/" + o.dataset + ".train.csv";
    test_path = dir + "/" + o.dataset + ".test.csv";
    d.name = o.dataset;
  }
  if (train_path.empty()) throw UsageError("give --dataset or --data");
  if (need_test && test_path.empty()) throw UsageError("give --dataset or --test");
  d.train = ob::load_tabular(train_path, load_options(o));
  if (!test_path.empty()) d.test = ob::load_tabular(test_path, load_options(o, d.train.n_classes));
  if (d.name.empty()) d.name = train_path;
  return d;
}

std::vector<std::uint32_t> read_ids(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ob::DataError("cannot open " + path);
  std::vector<std::uint32_t> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    for (char& ch : line) {
      if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
    }
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::uint32_t v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size()) {
        throw ob::DataError(path + ": line " + std::to_string(n) + ": bad instance id '" + tok + "'");
      }
      ids.push_back(v);
    }
  }
  return ids;
}

int cmd_train(const Options& o) {
  validate(o.hp);
  auto data = ob::load_tabular(o.data, load_options(o));
  auto t0 = std::chrono::steady_clock::now();
  ob::Model m = ob::train(data, o.hp);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double loss = mean_train_loss(m);
  ob::save_model(m, o.out, o.export_mode == "slim" ? ob::ExportMode::kSlim : ob::ExportMode::kFull);
  std::cout << "trained " << m.trees.size() << " trees on " << data.size() << " rows, " << m.n_classes
            << " classes in " << secs << " s\n";
  std::cout << "train loss " << loss << "\n";
  if (!o.test.empty()) {
    auto test = ob::load_tabular(o.test, load_options(o, m.n_classes));
    std::cout << "test error " << m.error_rate(test) << "\n";
  }
  return 0;
}

void emit_report(const Options& o, const ob::UpdateReport& r) {
  std::string json = ob::report_json(r, o.log_decisions);
  write_text(o.report, json + "\n");
  std::cout << "batch " << r.batch_size << ", retrained nodes " << r.retrained_nodes << ", touched leaves "
            << r.touched_leaves << ", training rows read " << r.training_row_reads << ", " << r.wall_us / 1000.0
            << " ms\n";
}

int cmd_add(const Options& o) {
  auto oo = online_options(o);
  ob::Model m = ob::load_model(o.model);
  auto rows = ob::load_tabular(o.rows, load_options(o, m.n_classes));
  auto r = ob::incremental_learn(m, rows, oo);
  ob::save_model(m, o.out.empty() ? o.model : o.out);
  emit_report(o, r);
  if (!r.ids.empty()) std::cout << "assigned ids " << r.ids.front() << ".." << r.ids.back() << "\n";
  return 0;
}

int cmd_delete(const Options& o) {
  auto oo = online_options(o);
  ob::Model m = ob::load_model(o.model);
  auto ids = read_ids(o.ids);
  auto r = ob::decremental_learn(m, ids, oo);
  const std::string out = o.out.empty() ? o.model : o.out;
  if (!ids.empty() || out != o.model) ob::save_model(m, out);
  emit_report(o, r);
  return 0;
}

int cmd_predict(const Options& o) {
  ob::Model m = ob::load_model(o.model);
  auto data = ob::load_tabular(o.data, load_options(o, o.unlabeled ? 0 : m.n_classes));
  if (data.n_features != m.n_features) {
    throw ob::DataError("dimension mismatch: model expects " + std::to_string(m.n_features) + " features, data has " +
                        std::to_string(data.n_features));
  }
  std::ostringstream os;
  os << "label";
  for (int k = 0; k < m.n_classes; ++k) os << ",p" << k;
  os << "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto pr = m.predict(data.row(i));
    os << pr.label;
    for (double p : pr.prob) os << ',' << fmt(p);
    os << '\n';
  }
  if (o.out.empty()) {
    std::cout << os.str();
  } else {
    write_text(o.out, os.str());
  }
  return 0;
}

int cmd_export(const Options& o) {
  ob::Model m = ob::load_model(o.model);
  ob::save_model(m, o.out, o.export_mode == "slim" ? ob::ExportMode::kSlim : ob::ExportMode::kFull);
  return 0;
}

int cmd_backdoor(const Options& o) {
  validate(o.hp);
  auto d = resolve_datasets(o, true);
  ob::BackdoorConfig cfg;
  cfg.poison_fraction = o.poison;
  cfg.target_label = o.target;
  cfg.trigger_features.clear();
  std::stringstream ss(o.trigger_features);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    int f = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), f);
    if (ec != std::errc() || p != tok.data() + tok.size()) throw UsageError("bad trigger feature '" + tok + "'");
    cfg.trigger_features.push_back(f);
  }
  cfg.seed = o.hp.seed;
  cfg.online = online_options(o);
  auto r = ob::run_backdoor_experiment(d.train, d.test, o.hp, cfg);
  write_text(o.json_out, ob::to_json(r) + "\n");
  write_text(o.csv_out, ob::to_csv(r));
  std::cout << ob::to_csv(r);
  return 0;
}

int cmd_similarity(const Options& o) {
  ob::Model a = ob::load_model(o.a);
  ob::Model b = ob::load_model(o.b);
  auto test = ob::load_tabular(o.test, load_options(o, a.n_classes));
  auto r = ob::functional_similarity(a, b, test);
  write_text(o.json_out, ob::to_json(r) + "\n");
  std::cout << ob::to_json(r) << "\n";
  return 0;
}

int cmd_schedule(const Options& o) {
  validate(o.hp);
  auto d = resolve_datasets(o, true);
  auto cfg = ob::ramp_schedule(o.parts);
  cfg.seed = o.hp.seed;
  cfg.retrain_reference = !o.no_reference;
  cfg.online = online_options(o);
  auto r = ob::run_batch_schedule(d.train, d.test, o.hp, cfg);
  write_text(o.json_out, ob::to_json(r) + "\n");
  write_text(o.csv_out, ob::to_csv(r));
  write_text(o.svg_out, ob::schedule_svg(r));
  std::cout << ob::to_csv(r);
  return 0;
}

int cmd_compare(const Options& o) {
  validate(o.hp);
  auto d = resolve_datasets(o, true);
  auto r = ob::compare_online_to_retrain(d.train, d.test, o.hp, o.size, o.hp.seed, online_options(o));
  write_text(o.json_out, ob::to_json(r) + "\n");
  std::cout << ob::to_json(r) << "\n";
  return 0;
}

int cmd_speedup(const Options& o) {
  validate(o.hp);
  std::vector<double> sizes;
  std::stringstream ss(o.sizes);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || !(v > 0)) throw UsageError("bad batch size '" + tok + "'");
    sizes.push_back(v);
  }
  if (sizes.empty()) throw UsageError("--sizes is empty");
  Options with_default = o;
  if (with_default.dataset.empty() && with_default.data.empty()) with_default.dataset = "synthetic";
  auto d = resolve_datasets(with_default, false);
  auto r = ob::benchmark_speedup(d.train, o.hp, sizes, o.hp.seed, online_options(o));
  write_text(o.json_out, ob::to_json(r) + "\n");
  write_text(o.csv_out, ob::to_csv(r));
  std::cout << ob::to_csv(r);
  return 0;
}

int run(const std::vector<std::string>& raw_args) {
  std::vector<std::string> args = merge_config(raw_args, find_config(raw_args));
  Options o;
  CLI::App app{"Online gradient boosted trees with exact incremental and decremental learning", "onlineboost"};
  Commands c = build(app, o);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  apply_seed_env(o);

  if (c.train->parsed()) return cmd_train(o);
  if (c.add->parsed()) return cmd_add(o);
  if (c.del->parsed()) return cmd_delete(o);
  if (c.predict->parsed()) return cmd_predict(o);
  if (c.exp->parsed()) return cmd_export(o);
  if (c.backdoor->parsed()) return cmd_backdoor(o);
  if (c.similarity->parsed()) return cmd_similarity(o);
  if (c.schedule->parsed()) return cmd_schedule(o);
  if (c.compare->parsed()) return cmd_compare(o);
  if (c.speedup->parsed()) return cmd_speedup(o);
  std::cerr << app.help();
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
