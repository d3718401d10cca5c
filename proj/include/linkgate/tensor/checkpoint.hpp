// Copyright 2026 The Linkgate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "linkgate/tensor/tensor.hpp"

// Checkpoint layout (format version "1"):
//
//   bytes 0..7   header length N, unsigned little-endian
//   bytes 8..8+N UTF-8 JSON header:
//                  {"format_version": "1",
//                   "metadata": {...},
//                   "tensors": [{"name": str, "shape": [int...], "offset": int}...]}
//   remainder    payload: every tensor's values as little-endian IEEE-754
//                doubles, row-major, at `offset` bytes from payload start
//
// Tensors appear in name order and the JSON is written with sorted keys, so
// equal contents always produce identical bytes.
namespace linkgate {

inline constexpr const char* kCheckpointFormatVersion = "1";

struct Checkpoint {
  nlohmann::json metadata = nlohmann::json::object();
  std::map<std::string, Tensor> tensors;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::string& bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace linkgate
