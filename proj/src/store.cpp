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

#include "onlineboost/store.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <unistd.h>

#include "json.hpp"

namespace onlineboost {

namespace {

constexpr char kMagic[4] = {'O', 'B', 'S', 'T'};

std::uint32_t checksum(const char* data, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    c = crc32(c, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

// Little-endian host layout; all values are written as raw bytes.
class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <typename T>
  void put_vec(const std::vector<T>& v) {
    put<std::uint64_t>(v.size());
    if (!v.empty()) buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
  }
  void put_sums(const Sums& s) {
    put(s.rp);
    put(s.pp);
  }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t begin, std::size_t end) : b_(bytes), pos_(begin), end_(end) {}

  void need(std::size_t n) const {
    if (end_ - pos_ < n) {
      throw StoreError("truncated file at offset " + std::to_string(pos_) + " (need " + std::to_string(n) +
                       " bytes, have " + std::to_string(end_ - pos_) + ")");
    }
  }
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  template <typename T>
  std::vector<T> get_vec() {
    auto n = get<std::uint64_t>();
    if (n > (end_ - pos_) / sizeof(T)) {
      throw StoreError("truncated file at offset " + std::to_string(pos_) + " (array of " + std::to_string(n) +
                       " elements)");
    }
    std::vector<T> v(n);
    if (n) std::memcpy(v.data(), b_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
    return v;
  }
  Sums get_sums() {
    Sums s;
    s.rp = get<Fixed>();
    s.pp = get<Fixed>();
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& b_;
  std::size_t pos_;
  std::size_t end_;
};

void add_section(std::string& out, const char tag[4], const std::string& payload) {
  out.append(tag, 4);
  std::uint64_t len = payload.size();
  out.append(reinterpret_cast<const char*>(&len), sizeof(len));
  out.append(payload);
  std::uint32_t c = checksum(payload.data(), payload.size());
  out.append(reinterpret_cast<const char*>(&c), sizeof(c));
}

struct Section {
  std::string tag;
  std::size_t begin;
  std::size_t end;
};

std::string encode_mapper(const BinMapper& m) {
  Writer w;
  w.put<std::int32_t>(m.max_bins);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.n_features()));
  for (int f = 0; f < m.n_features(); ++f) {
    w.put(m.bin_width[f]);
    w.put_vec(m.lower[f]);
    w.put_vec(m.upper[f]);
  }
  return w.take();
}

BinMapper decode_mapper(Reader& r) {
  BinMapper m;
  m.max_bins = r.get<std::int32_t>();
  auto nf = r.get<std::uint32_t>();
  for (std::uint32_t f = 0; f < nf; ++f) {
    m.bin_width.push_back(r.get<double>());
    m.lower.push_back(r.get_vec<double>());
    m.upper.push_back(r.get_vec<double>());
    if (m.lower.back().size() != m.upper.back().size() || m.lower.back().empty()) {
      throw StoreError("corrupt bin mapper for feature " + std::to_string(f));
    }
  }
  return m;
}

std::string encode_trees(const Model& model) {
  Writer w;
  w.put<std::uint64_t>(model.trees.size());
  for (const Tree& t : model.trees) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.nodes.size()));
    for (const TreeNode& n : t.nodes) {
      w.put(n.left);
      w.put(n.right);
      w.put(n.parent);
      w.put(n.feature);
      w.put(n.threshold);
      w.put(n.depth);
      w.put(n.path);
      w.put(n.beta);
      w.put(n.gain);
    }
  }
  return w.take();
}

void decode_trees(Reader& r, Model& model) {
  auto nt = r.get<std::uint64_t>();
  if (nt != static_cast<std::uint64_t>(model.params.M) * model.n_classes) {
    throw StoreError("tree count " + std::to_string(nt) + " does not match header");
  }
  model.trees.resize(nt);
  for (Tree& t : model.trees) {
    auto nn = r.get<std::uint32_t>();
    if (nn == 0) throw StoreError("empty tree at offset " + std::to_string(r.pos()));
    t.nodes.resize(nn);
    for (TreeNode& n : t.nodes) {
      n.left = r.get<std::int32_t>();
      n.right = r.get<std::int32_t>();
      n.parent = r.get<std::int32_t>();
      n.feature = r.get<std::int32_t>();
      n.threshold = r.get<Bin>();
      n.depth = r.get<std::uint16_t>();
      n.path = r.get<std::uint64_t>();
      n.beta = r.get<double>();
      n.gain = r.get<double>();
      const auto lim = static_cast<std::int32_t>(nn);
      bool ok = (n.left < 0) == (n.right < 0) && n.left < lim && n.right < lim && n.parent < lim &&
                (n.left < 0 || (n.feature >= 0 && n.feature < model.n_features));
      if (!ok) throw StoreError("corrupt tree node before offset " + std::to_string(r.pos()));
    }
  }
}

// Cells with zero count are skipped; their sums are exactly zero because the
// fixed-point updates cancel exactly.
std::string encode_stats(const Model& model) {
  Writer w;
  for (const Tree& t : model.trees) {
    for (const TreeNode& n : t.nodes) {
      const NodeStats& s = n.stats;
      w.put_vec(s.offset);
      w.put_vec(s.cand);
      std::uint32_t nz = 0;
      for (std::size_t j = 0; j < s.cell.size(); ++j) nz += (s.count[j] != 0 || !(s.cell[j] == Sums{})) ? 1 : 0;
      w.put(nz);
      for (std::size_t j = 0; j < s.cell.size(); ++j) {
        if (s.count[j] == 0 && s.cell[j] == Sums{}) continue;
        w.put(static_cast<std::uint32_t>(j));
        w.put(s.count[j]);
        w.put_sums(s.cell[j]);
      }
      w.put_sums(s.total);
      w.put(s.n);
    }
  }
  return w.take();
}

void decode_stats(Reader& r, Model& model) {
  for (Tree& t : model.trees) {
    for (TreeNode& n : t.nodes) {
      NodeStats& s = n.stats;
      s.offset = r.get_vec<std::uint32_t>();
      s.cand = r.get_vec<Bin>();
      if (s.offset.size() != static_cast<std::size_t>(model.n_features) + 1 || s.offset.back() != s.cand.size()) {
        throw StoreError("corrupt node statistics before offset " + std::to_string(r.pos()));
      }
      s.cell.assign(s.cand.size(), Sums{});
      s.count.assign(s.cand.size(), 0);
      auto nz = r.get<std::uint32_t>();
      for (std::uint32_t i = 0; i < nz; ++i) {
        auto j = r.get<std::uint32_t>();
        if (j >= s.cand.size()) throw StoreError("corrupt cell index before offset " + std::to_string(r.pos()));
        s.count[j] = r.get<std::int32_t>();
        s.cell[j] = r.get_sums();
      }
      s.total = r.get_sums();
      s.n = r.get<std::int64_t>();
    }
  }
}

std::string encode_state(const Model& model) {
  const TrainingState& st = *model.state;
  Writer w;
  w.put_vec(st.store.raw_bins());
  w.put_vec(st.store.raw_labels());
  w.put_vec(st.store.raw_alive());
  for (const auto& p : st.prob) w.put_vec(p);
  for (const auto& l : st.leaf) w.put_vec(l);
  w.put_vec(st.score);
  return w.take();
}

void decode_state(Reader& r, Model& model) {
  TrainingState& st = model.state.emplace();
  auto bins = r.get_vec<Bin>();
  auto labels = r.get_vec<std::int32_t>();
  auto alive = r.get_vec<std::uint8_t>();
  const std::size_t n = labels.size();
  if (alive.size() != n || bins.size() != n * model.n_features) throw StoreError("corrupt instance store");
  st.store = InstanceStore(model.n_features, model.n_classes);
  st.store.assign(std::move(bins), std::move(labels), std::move(alive));
  st.prob.resize(model.trees.size());
  st.leaf.resize(model.trees.size());
  for (auto& p : st.prob) {
    p = r.get_vec<double>();
    if (p.size() != n) throw StoreError("corrupt derivative table");
  }
  for (std::size_t t = 0; t < st.leaf.size(); ++t) {
    st.leaf[t] = r.get_vec<std::uint16_t>();
    if (st.leaf[t].size() != n) throw StoreError("corrupt leaf table");
    for (auto v : st.leaf[t]) {
      if (v >= model.trees[t].nodes.size()) throw StoreError("corrupt leaf table");
    }
  }
  st.score = r.get_vec<double>();
  if (st.score.size() != n * model.n_classes) throw StoreError("corrupt score table");
}

}  // namespace

std::string serialize_model(const Model& model, ExportMode mode) {
  const bool full = mode == ExportMode::kFull;
  if (full && !model.online_capable()) throw StoreError("a slim model cannot be exported in full mode");
  nlohmann::ordered_json h;
  h["format"] = "onlineboost";
  h["mode"] = full ? "full" : "slim";
  h["n_classes"] = model.n_classes;
  h["n_features"] = model.n_features;
  h["params"] = {{"iterations", model.params.M},  {"leaves", model.params.J},
                 {"bins", model.params.B},        {"shrinkage", model.params.shrinkage},
                 {"alpha", model.params.alpha},   {"sigma", model.params.sigma},
                 {"seed", model.params.seed}};
  if (full) h["instances"] = model.state->store.size();

  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kStoreVersion));
  add_section(out, "HEAD", h.dump());
  add_section(out, "BINS", encode_mapper(model.mapper));
  add_section(out, "TREE", encode_trees(model));
  if (full) {
    add_section(out, "STAT", encode_stats(model));
    add_section(out, "INST", encode_state(model));
  }
  return out;
}

Model deserialize_model(const std::string& bytes) {
  if (bytes.size() < 5) throw StoreError("truncated file at offset " + std::to_string(bytes.size()) + " (no header)");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw StoreError("not an onlineboost model file");
  auto version = static_cast<std::uint8_t>(bytes[4]);
  if (version != kStoreVersion) {
    throw StoreError("unsupported model format version " + std::to_string(version) + " (expected " +
                     std::to_string(kStoreVersion) + ")");
  }

  std::vector<Section> sections;
  std::size_t at = 5;
  while (at < bytes.size()) {
    Reader top(bytes, at, bytes.size());
    top.need(4);
    std::string tag = bytes.substr(at, 4);
    top.get<std::uint32_t>();
    auto len = top.get<std::uint64_t>();
    const std::size_t begin = top.pos();
    if (bytes.size() - begin < len) {
      throw StoreError("truncated file at offset " + std::to_string(bytes.size()) + " (section " + tag +
                       " at offset " + std::to_string(at) + " needs " + std::to_string(len) + " bytes)");
    }
    Reader skip(bytes, begin + len, bytes.size());
    auto stored = skip.get<std::uint32_t>();
    if (stored != checksum(bytes.data() + begin, len)) {
      throw StoreError("checksum mismatch in section " + tag + " at offset " + std::to_string(at));
    }
    sections.push_back({tag, begin, begin + len});
    at = skip.pos();
  }
  auto find = [&](const std::string& tag) -> const Section* {
    for (const auto& s : sections) {
      if (s.tag == tag) return &s;
    }
    return nullptr;
  };
  auto require = [&](const std::string& tag) -> const Section& {
    const Section* s = find(tag);
    if (!s) throw StoreError("missing section " + tag);
    return *s;
  };

  Model model;
  const Section& hs = require("HEAD");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.begin() + hs.begin, bytes.begin() + hs.end);
    model.n_classes = h.at("n_classes").get<int>();
    model.n_features = h.at("n_features").get<int>();
    const auto& p = h.at("params");
    model.params.M = p.at("iterations").get<int>();
    model.params.J = p.at("leaves").get<int>();
    model.params.B = p.at("bins").get<int>();
    model.params.shrinkage = p.at("shrinkage").get<double>();
    model.params.alpha = p.at("alpha").get<double>();
    model.params.sigma = p.at("sigma").get<double>();
    model.params.seed = p.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(std::string("corrupt header: ") + e.what());
  }
  const bool full = h.value("mode", "") == "full";
  if (model.n_classes < 2 || model.n_features < 1) throw StoreError("corrupt header: bad dimensions");

  const Section& bs = require("BINS");
  Reader br(bytes, bs.begin, bs.end);
  model.mapper = decode_mapper(br);
  if (model.mapper.n_features() != model.n_features) throw StoreError("bin mapper does not match header");

  const Section& ts = require("TREE");
  Reader tr(bytes, ts.begin, ts.end);
  decode_trees(tr, model);

  model.has_stats = full;
  if (full) {
    const Section& ss = require("STAT");
    Reader sr(bytes, ss.begin, ss.end);
    decode_stats(sr, model);
    const Section& is = require("INST");
    Reader ir(bytes, is.begin, is.end);
    decode_state(ir, model);
  }
  return model;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw StoreError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StoreError("cannot replace " + path);
  }
}

void save_model(const Model& model, const std::string& path, ExportMode mode) {
  write_file_atomic(path, serialize_model(model, mode));
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_model(ss.str());
  } catch (const StoreError& e) {
    throw StoreError(path + ": " + e.what());
  }
}

}  // namespace onlineboost
