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

#include "linkgate/harness/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "linkgate/error.hpp"
#include "linkgate/harness/evaluation.hpp"
#include "linkgate/tensor/random.hpp"

namespace linkgate::harness {
namespace {

constexpr const char* kCheckpointKind = "linkgate-model";

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(epoch) + 1));
}

void add_into(Tensor& acc, const Tensor& g) {
  auto a = acc.data();
  const auto b = g.data();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void scale_by(Tensor& t, double s) {
  for (double& v : t.data()) v *= s;
}

}  // namespace

Checkpoint to_checkpoint(const TrainState& s) {
  Checkpoint c;
  c.metadata["kind"] = kCheckpointKind;
  c.metadata["config"] = to_json(s.config);
  c.metadata["vocab"] = s.vocab.to_json();
  c.metadata["epoch"] = s.epoch;
  c.metadata["best_accuracy"] = s.best_accuracy;
  c.metadata["best_epoch"] = s.best_epoch;
  c.metadata["stale"] = s.stale;
  c.metadata["adam_steps"] = s.adam.steps();
  nlohmann::json history = nlohmann::json::array();
  for (const EpochRecord& r : s.history) {
    history.push_back({{"epoch", r.epoch},
                       {"loss", r.loss},
                       {"accuracy", r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr)}});
  }
  c.metadata["history"] = history;
  for (const auto& [name, t] : s.params.all()) c.tensors["param/" + name] = t;
  for (const auto& [name, t] : s.adam.first_moments()) c.tensors["adam_m/" + name] = t;
  for (const auto& [name, t] : s.adam.second_moments()) c.tensors["adam_v/" + name] = t;
  return c;
}

TrainState from_checkpoint(const Checkpoint& c) {
  try {
    if (c.metadata.value("kind", "") != kCheckpointKind) throw LoadError("checkpoint is not a model checkpoint");
    TrainState s;
    s.config = train_config_from_json(c.metadata.at("config"));
    s.vocab = Vocabulary::from_json(c.metadata.at("vocab"));
    s.epoch = c.metadata.at("epoch").get<std::size_t>();
    s.best_accuracy = c.metadata.at("best_accuracy").get<double>();
    s.best_epoch = c.metadata.at("best_epoch").get<std::size_t>();
    s.stale = c.metadata.at("stale").get<std::size_t>();
    for (const nlohmann::json& r : c.metadata.at("history")) {
      EpochRecord rec{r.at("epoch").get<std::size_t>(), r.at("loss").get<double>(), std::nullopt};
      if (!r.at("accuracy").is_null()) rec.accuracy = r.at("accuracy").get<double>();
      s.history.push_back(rec);
    }
    std::map<std::string, Tensor> m, v;
    for (const auto& [name, t] : c.tensors) {
      const auto slash = name.find('/');
      if (slash == std::string::npos) throw LoadError("unexpected checkpoint tensor '" + name + "'");
      const std::string group = name.substr(0, slash), key = name.substr(slash + 1);
      if (group == "param") {
        s.params.add(key, t);
      } else if (group == "adam_m") {
        m.emplace(key, t);
      } else if (group == "adam_v") {
        v.emplace(key, t);
      } else {
        throw LoadError("unexpected checkpoint tensor '" + name + "'");
      }
    }
    s.adam = Adam(AdamConfig{s.config.lr});
    s.adam.restore(c.metadata.at("adam_steps").get<std::int64_t>(), std::move(m), std::move(v));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed checkpoint metadata: ") + e.what());
  }
}

void save_state(const std::filesystem::path& path, const TrainState& state) {
  write_checkpoint(path, to_checkpoint(state));
}

TrainState load_state(const std::filesystem::path& path) { return from_checkpoint(read_checkpoint(path)); }

Vocabulary build_vocabulary(const std::vector<Example>& examples) {
  Vocabulary v;
  for (const Example& ex : examples) {
    for (const std::string& t : ex.tokens) v.add(t);
  }
  std::set<const Schema*> seen;
  for (const Example& ex : examples) {
    if (!seen.insert(ex.schema).second) continue;
    for (const Entity& e : ex.schema->entities()) {
      for (const std::string& t : e.name_tokens) v.add(t);
    }
  }
  return v;
}

std::string_view train_status_name(TrainStatus s) {
  switch (s) {
    case TrainStatus::Completed:
      return "completed";
    case TrainStatus::EarlyStopped:
      return "early-stopped";
    case TrainStatus::TargetReached:
      return "target-reached";
    case TrainStatus::NonFinite:
      return "non-finite-loss";
  }
  return "unknown";
}

Trainer::Trainer(TrainConfig config, std::vector<Example> train, std::vector<Example> monitor)
    : train_(std::move(train)), monitor_(std::move(monitor)) {
  validate(config);
  if (train_.empty()) throw UsageError("Trainer: empty training set");
  state_.config = config;
  state_.vocab = build_vocabulary(train_);
  Rng rng(config.seed);
  init_parameters(state_.params, config.model, state_.vocab.size(), rng);
  state_.adam = Adam(AdamConfig{config.lr});
}

Trainer::Trainer(TrainState state, std::vector<Example> train, std::vector<Example> monitor)
    : state_(std::move(state)), train_(std::move(train)), monitor_(std::move(monitor)) {
  validate(state_.config);
  if (train_.empty()) throw UsageError("Trainer: empty training set");
}

std::optional<double> Trainer::train_epoch() {
  const TrainConfig& cfg = state_.config;
  std::vector<std::size_t> order(train_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(epoch_seed(cfg.seed, state_.epoch));
  rng.shuffle(order);

  double total = 0.0;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    std::map<std::string, Tensor> grads;
    double batch_loss = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      const Example& ex = train_[order[k]];
      const Tensor link = linking_matrix(state_.params, state_.vocab, ex.tokens, *ex.schema, cfg.model.linking);
      Tape tape;
      const Var loss = teacher_forced_loss(tape, state_.params, cfg.model, state_.vocab, ex, link);
      batch_loss += loss.value()[0];
      const Gradients g = tape.backward(loss);
      for (const auto& [name, t] : g.params()) {
        auto [it, inserted] = grads.try_emplace(name, t);
        if (!inserted) add_into(it->second, t);
      }
    }
    const double scale = 1.0 / static_cast<double>(end - start);
    double norm2 = 0.0;
    for (auto& [name, t] : grads) {
      scale_by(t, scale);
      for (double v : t.data()) norm2 += v * v;
    }
    if (!std::isfinite(batch_loss) || !std::isfinite(norm2)) return std::nullopt;
    const double norm = std::sqrt(norm2);
    if (cfg.clip_norm > 0 && norm > cfg.clip_norm) {
      for (auto& [name, t] : grads) scale_by(t, cfg.clip_norm / norm);
    }
    state_.adam.step(state_.params, grads);
    total += batch_loss;
  }
  return total / static_cast<double>(train_.size());
}

TrainResult Trainer::run(const TrainOptions& options) {
  const TrainConfig& cfg = state_.config;
  const std::vector<Example>& monitor = monitor_.empty() ? train_ : monitor_;
  TrainResult result;
  bool best_saved = false;
  TrainState last_good = state_;

  while (state_.epoch < cfg.epochs) {
    const std::optional<double> loss = train_epoch();
    if (!loss) {
      if (options.log) *options.log << "epoch " << state_.epoch + 1 << ": non-finite loss, aborting\n";
      if (options.best_path && !best_saved) save_state(*options.best_path, last_good);
      state_ = std::move(last_good);
      result.status = TrainStatus::NonFinite;
      break;
    }
    ++state_.epoch;
    EpochRecord rec{state_.epoch, *loss, std::nullopt};
    bool improved = false;
    if (state_.epoch % cfg.eval_every == 0 || state_.epoch == cfg.epochs) {
      const double acc = accuracy(state_.params, cfg.model, state_.vocab, monitor);
      rec.accuracy = acc;
      if (acc > state_.best_accuracy) {
        state_.best_accuracy = acc;
        state_.best_epoch = state_.epoch;
        state_.stale = 0;
        improved = true;
      } else {
        ++state_.stale;
      }
    }
    state_.history.push_back(rec);
    if (options.log) {
      char line[160];
      if (rec.accuracy) {
        std::snprintf(line, sizeof line, "epoch %zu loss %.6f accuracy %.4f best %.4f@%zu\n", rec.epoch, rec.loss,
                      *rec.accuracy, state_.best_accuracy, state_.best_epoch);
      } else {
        std::snprintf(line, sizeof line, "epoch %zu loss %.6f\n", rec.epoch, rec.loss);
      }
      *options.log << line << std::flush;
    }
    if (improved && options.best_path) {
      save_state(*options.best_path, state_);
      best_saved = true;
    }
    if (options.last_path) save_state(*options.last_path, state_);
    last_good = state_;

    if (rec.accuracy && *rec.accuracy >= cfg.target_accuracy) {
      result.status = TrainStatus::TargetReached;
      break;
    }
    if (state_.stale >= cfg.patience) {
      result.status = TrainStatus::EarlyStopped;
      break;
    }
  }
  result.epochs = state_.epoch;
  result.best_accuracy = std::max(0.0, state_.best_accuracy);
  result.best_epoch = state_.best_epoch;
  return result;
}

}  // namespace linkgate::harness
