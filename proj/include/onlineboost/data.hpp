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

#ifndef ONLINEBOOST_DATA_HPP_
#define ONLINEBOOST_DATA_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace onlineboost {

using Bin = std::uint16_t;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawDataset {
  int n_features = 0;
  int n_classes = 0;
  std::vector<int> labels;
  std::vector<double> values;  // row-major, labels.size() x n_features

  std::size_t size() const { return labels.size(); }
  const double* row(std::size_t i) const { return values.data() + i * n_features; }
  void add_row(int label, const std::vector<double>& x);
  RawDataset subset(const std::vector<std::size_t>& rows) const;
};

enum class Format { kCsv, kLibsvm };

struct LoadOptions {
  Format format = Format::kCsv;
  bool header = false;
  // Index of the label column for CSV; negative counts from the end.
  int label_column = 0;
  // Forces the class count; 0 infers max label + 1.
  int n_classes = 0;
  // LIBSVM only: forces the dense width; 0 infers the largest index.
  int n_features = 0;
  // CSV only: rows hold features only and every label is 0.
  bool unlabeled = false;
};

RawDataset load_tabular(const std::string& path, const LoadOptions& opt = {});
RawDataset parse_tabular(const std::string& text, const LoadOptions& opt = {});

struct BinMapper {
  int max_bins = 0;
  // Per feature and bin id: smallest and largest training value in the bin.
  std::vector<std::vector<double>> lower;
  std::vector<std::vector<double>> upper;
  // Per feature: the width accepted after doubling.
  std::vector<double> bin_width;

  int n_features() const { return static_cast<int>(lower.size()); }
  int n_bins(int f) const { return static_cast<int>(lower[f].size()); }
  // Nearest bin by distance to the bin's value range; ties go to the lower bin.
  Bin map(int f, double v) const;
};

// Sorted-gap discretization: a new bin opens whenever a value exceeds the
// current anchor by more than the width; the width starts at 1e-10 and
// doubles until at most max_bins ids are needed.
BinMapper build_bin_mapper(const RawDataset& raw, int max_bins);
// Returns the bin id of each value in ascending order of the sorted input.
std::vector<int> discretize_sorted(const std::vector<double>& sorted, int max_bins, double* width_out);

struct BinnedDataset {
  int n_features = 0;
  int n_classes = 0;
  std::vector<int> labels;
  std::vector<Bin> bins;  // row-major

  std::size_t size() const { return labels.size(); }
  const Bin* row(std::size_t i) const { return bins.data() + i * n_features; }
};

BinnedDataset apply_bins(const RawDataset& raw, const BinMapper& mapper);

}  // namespace onlineboost

#endif  // ONLINEBOOST_DATA_HPP_
