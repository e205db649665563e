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

#include "onlineboost/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace onlineboost {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

double parse_number(std::string_view tok, std::size_t line) {
  tok = trim(tok);
  if (tok.empty()) throw DataError(where(line) + "missing value");
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw DataError(where(line) + "cannot parse number '" + std::string(tok) + "'");
  }
  return v;
}

int parse_label(std::string_view tok, std::size_t line) {
  double v = parse_number(tok, line);
  if (v < 0 || v != std::floor(v) || v > 65535) {
    throw DataError(where(line) + "unknown label value '" + std::string(trim(tok)) + "'");
  }
  return static_cast<int>(v);
}

void finish(RawDataset& ds, const LoadOptions& opt) {
  if (ds.size() == 0) throw DataError("no rows");
  int max_label = *std::max_element(ds.labels.begin(), ds.labels.end());
  if (opt.n_classes > 0) {
    if (max_label >= opt.n_classes) {
      throw DataError("unknown label value " + std::to_string(max_label) + " (expected < " +
                      std::to_string(opt.n_classes) + ")");
    }
    ds.n_classes = opt.n_classes;
  } else {
    ds.n_classes = std::max(2, max_label + 1);
  }
}

RawDataset parse_csv(const std::string& text, const LoadOptions& opt) {
  RawDataset ds;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> toks;
  std::vector<double> x;
  while (std::getline(in, line)) {
    ++line_no;
    if (opt.header && line_no == 1) continue;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    toks.clear();
    std::size_t start = 0;
    while (true) {
      std::size_t comma = sv.find(',', start);
      toks.push_back(sv.substr(start, comma == std::string_view::npos ? sv.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    int nt = static_cast<int>(toks.size());
    const int nf = opt.unlabeled ? nt : nt - 1;
    if (nf < 1) throw DataError(where(line_no) + "expected a label and at least one feature");
    int lc = -1;
    if (!opt.unlabeled) {
      lc = opt.label_column < 0 ? nt + opt.label_column : opt.label_column;
      if (lc < 0 || lc >= nt) throw DataError(where(line_no) + "label column out of range");
    }
    if (ds.size() == 0) {
      ds.n_features = nf;
    } else if (nf != ds.n_features) {
      throw DataError(where(line_no) + "dimension mismatch: expected " + std::to_string(ds.n_features) +
                      " features, found " + std::to_string(nf));
    }
    x.clear();
    for (int j = 0; j < nt; ++j) {
      if (j != lc) x.push_back(parse_number(toks[j], line_no));
    }
    ds.add_row(lc < 0 ? 0 : parse_label(toks[lc], line_no), x);
  }
  finish(ds, opt);
  return ds;
}

RawDataset parse_libsvm(const std::string& text, const LoadOptions& opt) {
  struct Entry {
    int label;
    std::vector<std::pair<int, double>> cells;
  };
  std::vector<Entry> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  int width = opt.n_features;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    std::istringstream ls{std::string(sv)};
    std::string tok;
    ls >> tok;
    Entry e{parse_label(tok, line_no), {}};
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) throw DataError(where(line_no) + "expected index:value, got '" + tok + "'");
      double idx = parse_number(std::string_view(tok).substr(0, colon), line_no);
      if (idx < 1 || idx != std::floor(idx)) throw DataError(where(line_no) + "bad feature index in '" + tok + "'");
      int i = static_cast<int>(idx) - 1;
      if (opt.n_features > 0 && i >= opt.n_features) {
        throw DataError(where(line_no) + "dimension mismatch: index " + std::to_string(i + 1) + " exceeds " +
                        std::to_string(opt.n_features));
      }
      e.cells.emplace_back(i, parse_number(std::string_view(tok).substr(colon + 1), line_no));
      width = std::max(width, i + 1);
    }
    rows.push_back(std::move(e));
  }
  RawDataset ds;
  ds.n_features = width;
  std::vector<double> x;
  for (const auto& e : rows) {
    x.assign(width, 0.0);
    for (auto [i, v] : e.cells) x[i] = v;
    ds.add_row(e.label, x);
  }
  if (ds.size() > 0 && width == 0) throw DataError("no features");
  finish(ds, opt);
  return ds;
}

}  // namespace

void RawDataset::add_row(int label, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != n_features) throw DataError("dimension mismatch");
  labels.push_back(label);
  values.insert(values.end(), x.begin(), x.end());
}

RawDataset RawDataset::subset(const std::vector<std::size_t>& rows) const {
  RawDataset out;
  out.n_features = n_features;
  out.n_classes = n_classes;
  out.labels.reserve(rows.size());
  out.values.reserve(rows.size() * n_features);
  for (std::size_t r : rows) {
    out.labels.push_back(labels.at(r));
    out.values.insert(out.values.end(), row(r), row(r) + n_features);
  }
  return out;
}

RawDataset parse_tabular(const std::string& text, const LoadOptions& opt) {
  return opt.format == Format::kCsv ? parse_csv(text, opt) : parse_libsvm(text, opt);
}

RawDataset load_tabular(const std::string& path, const LoadOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_tabular(ss.str(), opt);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<int> discretize_sorted(const std::vector<double>& v, int max_bins, double* width_out) {
  std::vector<int> ids(v.size(), 0);
  double width = 1e-10;
  while (true) {
    int cnt = 0;
    std::size_t anchor = 0;
    bool overflow = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] - v[anchor] > width) {
        ++cnt;
        anchor = i;
        if (cnt >= max_bins) {
          overflow = true;
          break;
        }
      }
      ids[i] = cnt;
    }
    if (!overflow) break;
    width *= 2;
  }
  if (width_out) *width_out = width;
  return ids;
}

BinMapper build_bin_mapper(const RawDataset& raw, int max_bins) {
  if (max_bins < 2 || max_bins > 65536) throw DataError("max bins must be in [2, 65536]");
  if (raw.size() == 0) throw DataError("no rows");
  BinMapper m;
  m.max_bins = max_bins;
  const int nf = raw.n_features;
  m.lower.resize(nf);
  m.upper.resize(nf);
  m.bin_width.resize(nf);
  std::vector<double> col;
  for (int f = 0; f < nf; ++f) {
    col.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) col[i] = raw.row(i)[f];
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    std::vector<int> ids = discretize_sorted(col, max_bins, &m.bin_width[f]);
    int nb = ids.back() + 1;
    m.lower[f].assign(nb, 0.0);
    m.upper[f].assign(nb, 0.0);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (i == 0 || ids[i] != ids[i - 1]) m.lower[f][ids[i]] = col[i];
      m.upper[f][ids[i]] = col[i];
    }
  }
  return m;
}

Bin BinMapper::map(int f, double v) const {
  const auto& lo = lower[f];
  const auto& hi = upper[f];
  auto it = std::upper_bound(lo.begin(), lo.end(), v);
  if (it == lo.begin()) return 0;
  std::size_t j = static_cast<std::size_t>(it - lo.begin()) - 1;
  if (v <= hi[j] || j + 1 == lo.size()) return static_cast<Bin>(j);
  return static_cast<Bin>(lo[j + 1] - v < v - hi[j] ? j + 1 : j);
}

BinnedDataset apply_bins(const RawDataset& raw, const BinMapper& mapper) {
  if (raw.n_features != mapper.n_features()) {
    throw DataError("feature count mismatch: data has " + std::to_string(raw.n_features) + ", model expects " +
                    std::to_string(mapper.n_features()));
  }
  BinnedDataset out;
  out.n_features = raw.n_features;
  out.n_classes = raw.n_classes;
  out.labels = raw.labels;
  out.bins.resize(raw.values.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double* x = raw.row(i);
    Bin* b = out.bins.data() + i * raw.n_features;
    for (int f = 0; f < raw.n_features; ++f) b[f] = mapper.map(f, x[f]);
  }
  return out;
}

}  // namespace onlineboost
