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

#include <cstddef>
#include <string>
#include <string_view>

#include "linkgate/schema/linking.hpp"
#include "linkgate/tensor/tape.hpp"

namespace linkgate {

class Rng;

enum class GateMode {
  Dynamic,         // link gate and copy gate both learned
  SchemaOnly,      // entities come from schema linking alone
  NoCopy,          // structural linking without the copy branch
  DedicatedEmbed,  // gates read a separate projection of [h_t; c_t]
};

std::string_view gate_mode_name(GateMode m);
GateMode parse_gate_mode(std::string_view name);  // throws ConfigError

struct ModelConfig {
  std::size_t d = 64;         // hidden size; each question-encoder direction has d/2
  std::size_t gnn_steps = 2;  // message-passing rounds L
  GateMode gate_mode = GateMode::Dynamic;
  bool remove_generated = false;  // drop generated entities from schema linking
  LinkingWeights linking;
  std::size_t max_steps = 200;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Fixed table sizes.
inline constexpr std::size_t kEntityTypeCount = 11;  // table + 5 column types x primary flag
std::size_t frontier_slot_count();                   // rows of dec.frontier_emb

// Creates every parameter for the configuration: Glorot-uniform matrices,
// zero biases (forget gates start at 1).
void init_parameters(ParameterStore& store, const ModelConfig& config, std::size_t vocab_size, Rng& rng);

}  // namespace linkgate
