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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linkgate/model/config.hpp"
#include "linkgate/schema/schema.hpp"
#include "linkgate/sql/ast.hpp"
#include "linkgate/tensor/tape.hpp"

namespace linkgate {

// Row of dec.frontier_emb for a frontier: nonterminals first, then one row
// per entity slot position in the grammar.
std::size_t frontier_index(const sql::Frontier& f);

struct ActionEmbedding {
  Var a;        // action embedding a_t
  Var context;  // c_t
  Var lambda;   // attention over question tokens
};

// lambda = softmax(Q h / sqrt(d)), c = lambda' Q, a = tanh(W_ff [h; c] + b_ff).
ActionEmbedding action_embedding(Var h, Var question, Var w_ff, Var b_ff);

// Softmax of rule_emb a restricted to the rules of nt.
Var rule_distribution(Var a, Var rule_emb, sql::Nonterminal nt);

// sigmoid(w . g + b), shape {1}.
Var gate_value(Var g, Var w, Var b);

std::vector<bool> kind_mask(const Schema& schema, EntityKind kind);

// lambda' M restricted to the mask and renormalized.
Var schema_prob(Var lambda, Var linking, const std::vector<bool>& mask);

// Row-wise softmax of raw pairwise scores over the masked targets.
Var structural_matrix(Var scores, const std::vector<bool>& mask);

// Identity restricted to the mask: row i is one-hot on i when i is allowed.
Tensor copy_matrix(std::size_t n, const std::vector<bool>& mask);

// Additive attention of a query over memory keys (m x d):
// softmax_m(v . tanh(Wq q + Wk k_m)), optionally restricted to a slot mask.
Var additive_attention(Var query, Var keys, Var wq, Var wk, Var v, const std::vector<bool>* mask = nullptr);

// sum_m beta[m] * rows[entity(m)] for a row-stochastic matrix.
Var memory_mixture(Var beta, Var matrix, const std::vector<int>& entities);

struct GateOverride {
  std::optional<double> rho_link;
  std::optional<double> rho_copy;
};

struct GateTraceEntry {
  std::size_t step = 0;  // action index
  sql::Nonterminal nonterminal = sql::Nonterminal::Stmt;  // owner of the slot
  EntityKind slot = EntityKind::Column;
  std::optional<double> rho_link;  // empty when not applicable
  std::optional<double> rho_copy;  // empty when not applicable or no copy target
  std::size_t lambda_argmax = 0;
  std::optional<std::size_t> beta_link_argmax;
  std::optional<std::size_t> beta_copy_argmax;
  int chosen_entity = -1;
  double p_schema = 0.0;  // rho_link * schema probability of the chosen entity
  double p_struct = 0.0;  // (1 - rho_link) * structural probability of the chosen entity
  std::vector<double> distribution;
  std::vector<double> schema_distribution;
};

// Per-question decoder state. Call distribution() for the current frontier,
// then commit() the chosen action; repeat until the AST is complete.
class DecoderRun {
 public:
  DecoderRun(Tape& tape, const ParameterStore& store, const ModelConfig& config, const Schema& schema,
             Var question, Var question_final, Var entities, Tensor linking, GateOverride override = {});

  Var distribution(const sql::Frontier& f);
  void commit(const sql::Action& a);

  const std::vector<GateTraceEntry>& trace() const { return trace_; }
  const std::vector<int>& memory_entities() const { return memory_entities_; }
  // a_t of the most recent distribution() call.
  Var current_embedding() const { return current_a_; }

 private:
  Var param(const std::string& name) { return tape_.param(store_, name); }
  Var entity_distribution(const sql::Frontier& f, const ActionEmbedding& emb, Var h);
  Var structural(EntityKind kind);

  Tape& tape_;
  const ParameterStore& store_;
  const ModelConfig& config_;
  const Schema& schema_;
  Var question_;
  Var entities_;
  Var linking_;
  GateOverride override_;

  Var h_, c_;
  Var prev_input_;
  Var current_a_;
  bool pending_ = false;
  bool pending_entity_ = false;
  std::size_t step_ = 0;

  std::vector<Var> memory_actions_;
  std::vector<int> memory_entities_;
  std::optional<Var> scores_;
  std::map<EntityKind, Var> structural_;
  std::vector<GateTraceEntry> trace_;
  std::vector<std::vector<double>> structural_trace_;  // p_struct per gated entity step
};

}  // namespace linkgate
