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

#ifndef ONLINEBOOST_STORE_HPP_
#define ONLINEBOOST_STORE_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "onlineboost/boosting.hpp"

namespace onlineboost {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint8_t kStoreVersion = 1;

enum class ExportMode {
  kFull,  // trees, node statistics and training state; supports online updates
  kSlim,  // trees and bin mapper only; prediction only
};

// File layout: "OBST", version byte, then length-prefixed sections, each
// followed by its crc32. The first section is a JSON header.
std::string serialize_model(const Model& model, ExportMode mode = ExportMode::kFull);
Model deserialize_model(const std::string& bytes);

// Writes through a temporary file and renames it into place.
void save_model(const Model& model, const std::string& path, ExportMode mode = ExportMode::kFull);
Model load_model(const std::string& path);

// Writes bytes to path atomically.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace onlineboost

#endif  // ONLINEBOOST_STORE_HPP_
