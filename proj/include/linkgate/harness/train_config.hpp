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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "linkgate/model/config.hpp"

namespace linkgate::harness {

enum class Monitor { Dev, Train };

struct TrainConfig {
  std::uint64_t seed = 7;
  ModelConfig model;
  double lr = 0.005;
  std::size_t batch_size = 4;
  std::size_t epochs = 300;
  std::size_t patience = 20;      // evaluations without improvement before stopping
  std::size_t eval_every = 1;     // epochs between monitor evaluations
  double target_accuracy = 1.0;   // stop once the monitor reaches this
  double clip_norm = 5.0;         // global gradient-norm clip; 0 disables
  Monitor monitor = Monitor::Dev;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Flat "key = value" text, '#' starts a comment. Keys: seed, d, L, lr,
// batch_size, epochs, patience, eval_every, target_accuracy, clip_norm,
// monitor (dev|train), gate_mode, remove_generated, max_steps, w_exact,
// w_partial, w_lemma, w_edit, temperature. Unknown keys and bad values throw
// ConfigError naming the line.
TrainConfig parse_train_config(std::string_view text);
TrainConfig load_train_config(const std::filesystem::path& path);
// Every key, one per line, in the order listed above.
std::string format_train_config(const TrainConfig& config);

// Throws ConfigError for values the trainer cannot run with.
void validate(const TrainConfig& config);

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace linkgate::harness
