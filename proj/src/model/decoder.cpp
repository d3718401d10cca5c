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

#include "linkgate/model/decoder.hpp"

#include <array>
#include <cmath>

#include "linkgate/error.hpp"
#include "linkgate/model/encoders.hpp"
#include "linkgate/sql/grammar.hpp"
#include "linkgate/tensor/ops.hpp"

namespace linkgate {
namespace {

// (rule, child) -> ordinal among all entity slots of the grammar.
const std::map<std::pair<int, int>, std::size_t>& slot_ordinals() {
  static const auto table = [] {
    std::map<std::pair<int, int>, std::size_t> out;
    for (const sql::Rule& r : sql::Grammar::instance().rules()) {
      for (std::size_t i = 0; i < r.children.size(); ++i) {
        if (r.children[i].kind == sql::SymbolKind::Nonterminal) continue;
        out.emplace(std::make_pair(r.id, static_cast<int>(i)), out.size());
      }
    }
    return out;
  }();
  return table;
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

std::size_t frontier_slot_count() { return sql::kNonterminalCount + slot_ordinals().size(); }

std::size_t frontier_index(const sql::Frontier& f) {
  switch (f.kind) {
    case sql::Frontier::Kind::Nonterminal: return static_cast<std::size_t>(f.nt);
    case sql::Frontier::Kind::TableSlot:
    case sql::Frontier::Kind::ColumnSlot: {
      const auto it = slot_ordinals().find({f.owner_rule, f.child});
      if (it == slot_ordinals().end()) throw UsageError("frontier does not name an entity slot");
      return sql::kNonterminalCount + it->second;
    }
    case sql::Frontier::Kind::Done: break;
  }
  throw UsageError("no open symbol: the AST is complete");
}

ActionEmbedding action_embedding(Var h, Var question, Var w_ff, Var b_ff) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(h.size()));
  const Var lambda = ops::softmax(ops::scale(ops::matmul(question, h), scale));
  const Var context = ops::matmul(lambda, question);
  const std::array<Var, 2> hc{h, context};
  const Var a = ops::tanh(ops::add(ops::matmul(w_ff, ops::concat(hc)), b_ff));
  return {a, context, lambda};
}

Var rule_distribution(Var a, Var rule_emb, sql::Nonterminal nt) {
  std::vector<bool> mask(rule_emb.shape()[0], false);
  for (int r : sql::Grammar::instance().rules_for(nt)) mask[static_cast<std::size_t>(r)] = true;
  return ops::masked_softmax(ops::matmul(rule_emb, a), mask);
}

Var gate_value(Var g, Var w, Var b) { return ops::sigmoid(ops::add(ops::reshape(ops::dot(w, g), Shape{1}), b)); }

std::vector<bool> kind_mask(const Schema& schema, EntityKind kind) {
  std::vector<bool> mask(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) mask[i] = schema.entity(i).kind == kind;
  return mask;
}

Var schema_prob(Var lambda, Var linking, const std::vector<bool>& mask) {
  return ops::mask_normalize(ops::matmul(lambda, linking), mask);
}

Var structural_matrix(Var scores, const std::vector<bool>& mask) { return ops::masked_softmax(scores, mask); }

Tensor copy_matrix(std::size_t n, const std::vector<bool>& mask) {
  Tensor out({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.at(i)) out.at(i, i) = 1.0;
  }
  return out;
}

Var additive_attention(Var query, Var keys, Var wq, Var wk, Var v, const std::vector<bool>* mask) {
  const Var hidden = ops::tanh(ops::add_rowwise(ops::matmul_nt(keys, wk), ops::matmul(wq, query)));
  const Var scores = ops::matmul(hidden, v);
  return mask ? ops::masked_softmax(scores, *mask) : ops::softmax(scores);
}

Var memory_mixture(Var beta, Var matrix, const std::vector<int>& entities) {
  std::vector<std::size_t> rows(entities.begin(), entities.end());
  return ops::matmul(beta, ops::gather_rows(matrix, rows));
}

DecoderRun::DecoderRun(Tape& tape, const ParameterStore& store, const ModelConfig& config, const Schema& schema,
                       Var question, Var question_final, Var entities, Tensor linking, GateOverride override)
    : tape_(tape),
      store_(store),
      config_(config),
      schema_(schema),
      question_(question),
      entities_(entities),
      override_(override) {
  if (linking.shape() != Shape{question.shape()[0], schema.size()}) {
    throw ConfigError("linking matrix " + shape_string(linking.shape()) + " does not match question and schema");
  }
  linking_ = tape.constant(std::move(linking));
  h_ = question_final;
  c_ = tape.constant(Tensor({question_final.size()}));
  prev_input_ = param("dec.start");
}

Var DecoderRun::structural(EntityKind kind) {
  if (auto it = structural_.find(kind); it != structural_.end()) return it->second;
  if (!scores_) {
    scores_ = ops::pairwise_additive_scores(entities_, param("dec.struct.W_alpha"), param("dec.struct.v_alpha"));
  }
  const Var t = structural_matrix(*scores_, kind_mask(schema_, kind));
  structural_.emplace(kind, t);
  return t;
}

Var DecoderRun::distribution(const sql::Frontier& f) {
  if (pending_) throw UsageError("DecoderRun: distribution() called twice without commit()");
  const Var frontier = ops::row(param("dec.frontier_emb"), frontier_index(f));
  const std::array<Var, 2> input{prev_input_, frontier};
  const LstmState s = lstm_cell(param("dec.lstm.W"), param("dec.lstm.b"), ops::concat(input), {h_, c_});
  h_ = s.h;
  c_ = s.c;
  const ActionEmbedding emb = action_embedding(h_, question_, param("dec.ff.W"), param("dec.ff.b"));
  current_a_ = emb.a;
  pending_ = true;
  pending_entity_ = f.is_slot();
  if (!f.is_slot()) return rule_distribution(emb.a, param("dec.rule_emb"), f.nt);
  return entity_distribution(f, emb, h_);
}

Var DecoderRun::entity_distribution(const sql::Frontier& f, const ActionEmbedding& emb, Var h) {
  const EntityKind kind = f.kind == sql::Frontier::Kind::TableSlot ? EntityKind::Table : EntityKind::Column;
  const std::vector<bool> mask = kind_mask(schema_, kind);
  std::vector<bool> schema_mask = mask;
  if (config_.remove_generated) {
    std::vector<bool> reduced = mask;
    for (int e : memory_entities_) reduced[static_cast<std::size_t>(e)] = false;
    if (std::find(reduced.begin(), reduced.end(), true) != reduced.end()) schema_mask = std::move(reduced);
  }

  GateTraceEntry entry;
  entry.step = step_;
  entry.nonterminal = f.nt;
  entry.slot = kind;
  entry.lambda_argmax = argmax(emb.lambda.value().data());

  const Var p_schema = schema_prob(emb.lambda, linking_, schema_mask);
  entry.schema_distribution = p_schema.value().values();

  if (memory_entities_.empty()) {
    // First entity: schema linking only, gates not applicable.
    entry.distribution = entry.schema_distribution;
    trace_.push_back(std::move(entry));
    return p_schema;
  }

  Var g = emb.a;
  if (config_.gate_mode == GateMode::DedicatedEmbed) {
    const std::array<Var, 2> hc{h, emb.context};
    g = ops::tanh(ops::add(ops::matmul(param("dec.dedicated.W"), ops::concat(hc)), param("dec.dedicated.b")));
  }

  Var rho_link;
  if (override_.rho_link) {
    rho_link = tape_.constant(Tensor::scalar(*override_.rho_link));
  } else if (config_.gate_mode == GateMode::SchemaOnly) {
    rho_link = tape_.constant(Tensor::scalar(1.0));
  } else {
    rho_link = gate_value(g, param("dec.link_gate.w"), param("dec.link_gate.b"));
  }

  const Var keys = ops::stack_rows(memory_actions_);
  Var p_struct;
  if (config_.gate_mode == GateMode::SchemaOnly && !override_.rho_link) {
    p_struct = tape_.constant(Tensor({schema_.size()}));
  } else {
    const Var beta_link = additive_attention(emb.a, keys, param("dec.att_link.Wq"), param("dec.att_link.Wk"),
                                             param("dec.att_link.v"));
    entry.beta_link_argmax = argmax(beta_link.value().data());
    p_struct = memory_mixture(beta_link, structural(kind), memory_entities_);

    std::vector<bool> copyable(memory_entities_.size());
    bool any_copyable = false;
    for (std::size_t m = 0; m < memory_entities_.size(); ++m) {
      copyable[m] = mask[static_cast<std::size_t>(memory_entities_[m])];
      any_copyable = any_copyable || copyable[m];
    }
    const bool copy_enabled = config_.gate_mode != GateMode::NoCopy || override_.rho_copy.has_value();
    if (any_copyable && copy_enabled) {
      Var rho_copy = override_.rho_copy ? tape_.constant(Tensor::scalar(*override_.rho_copy))
                                        : gate_value(g, param("dec.copy_gate.w"), param("dec.copy_gate.b"));
      const Var beta_copy = additive_attention(emb.a, keys, param("dec.att_copy.Wq"), param("dec.att_copy.Wk"),
                                               param("dec.att_copy.v"), &copyable);
      entry.beta_copy_argmax = argmax(beta_copy.value().data());
      const Var copy = memory_mixture(beta_copy, tape_.constant(copy_matrix(schema_.size(), mask)), memory_entities_);
      p_struct = ops::add(ops::scale(copy, rho_copy), ops::scale(p_struct, ops::one_minus(rho_copy)));
      entry.rho_copy = rho_copy.value()[0];
    }
  }
  entry.rho_link = rho_link.value()[0];
  const Var p = ops::add(ops::scale(p_schema, rho_link), ops::scale(p_struct, ops::one_minus(rho_link)));
  entry.distribution = p.value().values();
  // Contributions to the chosen entity are filled in by commit().
  entry.p_schema = *entry.rho_link;
  entry.p_struct = 1.0 - *entry.rho_link;
  entry.schema_distribution = p_schema.value().values();
  structural_trace_.push_back(p_struct.value().values());
  trace_.push_back(std::move(entry));
  return p;
}

void DecoderRun::commit(const sql::Action& a) {
  if (!pending_) throw UsageError("DecoderRun: commit() without distribution()");
  if (a.is_rule() == pending_entity_) throw UsageError("DecoderRun: action kind does not match the frontier");
  pending_ = false;
  if (a.is_rule()) {
    prev_input_ = ops::row(param("dec.action_in"), static_cast<std::size_t>(a.value));
  } else {
    const std::size_t e = static_cast<std::size_t>(a.value);
    if (e >= schema_.size()) throw UsageError("DecoderRun: entity out of range");
    GateTraceEntry& entry = trace_.back();
    entry.chosen_entity = a.value;
    if (entry.rho_link) {
      entry.p_schema = *entry.rho_link * entry.schema_distribution[e];
      entry.p_struct = (1.0 - *entry.rho_link) * structural_trace_.back()[e];
    } else {
      entry.p_schema = entry.schema_distribution[e];
      entry.p_struct = 0.0;
    }
    prev_input_ = ops::row(entities_, e);
    memory_actions_.push_back(current_a_);
    memory_entities_.push_back(a.value);
  }
  ++step_;
}

}  // namespace linkgate
