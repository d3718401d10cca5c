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

#include "linkgate/model/config.hpp"

#include "linkgate/error.hpp"
#include "linkgate/sql/grammar.hpp"
#include "linkgate/tensor/random.hpp"

namespace linkgate {

std::string_view gate_mode_name(GateMode m) {
  switch (m) {
    case GateMode::Dynamic: return "dynamic";
    case GateMode::SchemaOnly: return "schema-only";
    case GateMode::NoCopy: return "no-copy";
    case GateMode::DedicatedEmbed: return "dedicated-embed";
  }
  return "?";
}

GateMode parse_gate_mode(std::string_view name) {
  for (GateMode m : {GateMode::Dynamic, GateMode::SchemaOnly, GateMode::NoCopy, GateMode::DedicatedEmbed}) {
    if (gate_mode_name(m) == name) return m;
  }
  throw ConfigError("unknown gate mode '" + std::string(name) +
                    "' (expected dynamic, schema-only, no-copy or dedicated-embed)");
}

void init_parameters(ParameterStore& store, const ModelConfig& config, std::size_t vocab_size, Rng& rng) {
  const std::size_t d = config.d;
  if (d < 2 || d % 2 != 0) throw ConfigError("hidden size d must be even and at least 2");
  const std::size_t half = d / 2;
  const std::size_t rules = static_cast<std::size_t>(sql::kRuleCount);
  auto matrix = [&](const std::string& name, Shape shape) { store.add(name, glorot_init(shape, rng)); };
  auto zeros = [&](const std::string& name, Shape shape) { store.add(name, Tensor(std::move(shape))); };
  auto lstm_bias = [&](const std::string& name, std::size_t n) {
    Tensor b({4 * n});
    for (std::size_t i = n; i < 2 * n; ++i) b[i] = 1.0;
    store.add(name, std::move(b));
  };

  matrix("enc.word_emb", {vocab_size, d});
  matrix("enc.fwd.W", {4 * half, d + half});
  lstm_bias("enc.fwd.b", half);
  matrix("enc.bwd.W", {4 * half, d + half});
  lstm_bias("enc.bwd.b", half);

  matrix("gnn.type_emb", {kEntityTypeCount, d});
  matrix("gnn.W_init", {d, 2 * d});
  for (const char* g : {"tc", "fp", "pf"}) {
    matrix(std::string("gnn.W_") + g, {d, d});
    zeros(std::string("gnn.b_") + g, {d});
  }
  for (const char* gate : {"z", "r", "n"}) {
    matrix(std::string("gnn.gru.W_") + gate, {d, d});
    matrix(std::string("gnn.gru.U_") + gate, {d, d});
    zeros(std::string("gnn.gru.b_") + gate, {d});
  }

  matrix("dec.lstm.W", {4 * d, 3 * d});
  lstm_bias("dec.lstm.b", d);
  matrix("dec.start", {d});
  matrix("dec.action_in", {rules, d});
  matrix("dec.frontier_emb", {frontier_slot_count(), d});
  matrix("dec.ff.W", {d, 2 * d});
  zeros("dec.ff.b", {d});
  matrix("dec.rule_emb", {rules, d});
  matrix("dec.link_gate.w", {d});
  zeros("dec.link_gate.b", {1});
  matrix("dec.copy_gate.w", {d});
  zeros("dec.copy_gate.b", {1});
  for (const char* att : {"dec.att_copy", "dec.att_link"}) {
    matrix(std::string(att) + ".Wq", {d, d});
    matrix(std::string(att) + ".Wk", {d, d});
    matrix(std::string(att) + ".v", {d});
  }
  matrix("dec.struct.W_alpha", {d, 2 * d});
  matrix("dec.struct.v_alpha", {d});
  if (config.gate_mode == GateMode::DedicatedEmbed) {
    matrix("dec.dedicated.W", {d, 2 * d});
    zeros("dec.dedicated.b", {d});
  }
}

}  // namespace linkgate
