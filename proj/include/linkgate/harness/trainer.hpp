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
#include <optional>
#include <ostream>
#include <vector>

#include "linkgate/harness/train_config.hpp"
#include "linkgate/model/model.hpp"
#include "linkgate/tensor/adam.hpp"
#include "linkgate/tensor/checkpoint.hpp"

namespace linkgate::harness {

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;  // mean per-example loss
  std::optional<double> accuracy;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

// Everything needed to decode with a model or to resume training exactly.
struct TrainState {
  TrainConfig config;
  Vocabulary vocab;
  ParameterStore params;
  Adam adam;
  std::size_t epoch = 0;  // completed epochs
  double best_accuracy = -1.0;
  std::size_t best_epoch = 0;
  std::size_t stale = 0;  // evaluations since the last improvement
  std::vector<EpochRecord> history;
};

Checkpoint to_checkpoint(const TrainState& state);
TrainState from_checkpoint(const Checkpoint& checkpoint);  // throws LoadError
void save_state(const std::filesystem::path& path, const TrainState& state);
TrainState load_state(const std::filesystem::path& path);

// Question tokens, then entity-name tokens of each database in order of
// first appearance.
Vocabulary build_vocabulary(const std::vector<Example>& examples);

enum class TrainStatus { Completed, EarlyStopped, TargetReached, NonFinite };
std::string_view train_status_name(TrainStatus s);

struct TrainResult {
  TrainStatus status = TrainStatus::Completed;
  std::size_t epochs = 0;
  double best_accuracy = 0.0;
  std::size_t best_epoch = 0;
};

struct TrainOptions {
  std::optional<std::filesystem::path> best_path;  // rewritten on every improvement
  std::optional<std::filesystem::path> last_path;  // rewritten after every epoch
  std::ostream* log = nullptr;
};

class Trainer {
 public:
  // Fresh model: vocabulary from `train`, parameters from the config seed.
  Trainer(TrainConfig config, std::vector<Example> train, std::vector<Example> monitor);
  // Continues from a saved state.
  Trainer(TrainState state, std::vector<Example> train, std::vector<Example> monitor);

  // One pass over the shuffled training set. Returns the mean loss, or
  // nullopt (leaving parameters unchanged since the last good batch) when a
  // loss or gradient is not finite.
  std::optional<double> train_epoch();

  // Trains until the epoch budget, early stopping, the target accuracy, or a
  // non-finite loss. On a non-finite loss the best path receives the last
  // completed epoch's state unless a best checkpoint already exists.
  TrainResult run(const TrainOptions& options = {});

  const TrainState& state() const { return state_; }
  TrainState& state() { return state_; }

 private:
  TrainState state_;
  std::vector<Example> train_;
  std::vector<Example> monitor_;
};

}  // namespace linkgate::harness
