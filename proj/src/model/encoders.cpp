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

#include "linkgate/model/encoders.hpp"

#include <array>

#include "linkgate/error.hpp"
#include "linkgate/tensor/ops.hpp"

namespace linkgate {

LstmState lstm_cell(Var w, Var b, Var x, const LstmState& state) {
  const std::size_t n = state.h.size();
  const std::array<Var, 2> in{x, state.h};
  const Var z = ops::add(ops::matmul(w, ops::concat(in)), b);
  const Var i = ops::sigmoid(ops::slice(z, 0, n));
  const Var f = ops::sigmoid(ops::slice(z, n, n));
  const Var g = ops::tanh(ops::slice(z, 2 * n, n));
  const Var o = ops::sigmoid(ops::slice(z, 3 * n, n));
  const Var c = ops::add(ops::mul(f, state.c), ops::mul(i, g));
  return {ops::mul(o, ops::tanh(c)), c};
}

EncodedQuestion encode_question(Tape& tape, const ParameterStore& store, const std::vector<std::size_t>& token_ids) {
  if (token_ids.empty()) throw UsageError("encode_question: empty question");
  const Var emb = ops::embedding_lookup(tape.param(store, "enc.word_emb"), token_ids);
  const Var wf = tape.param(store, "enc.fwd.W"), bf = tape.param(store, "enc.fwd.b");
  const Var wb = tape.param(store, "enc.bwd.W"), bb = tape.param(store, "enc.bwd.b");
  const std::size_t half = store.get("enc.fwd.b").size() / 4;
  const std::size_t n = token_ids.size();

  std::vector<Var> fwd(n), bwd(n);
  LstmState s{tape.constant(Tensor({half})), tape.constant(Tensor({half}))};
  for (std::size_t t = 0; t < n; ++t) {
    s = lstm_cell(wf, bf, ops::row(emb, t), s);
    fwd[t] = s.h;
  }
  s = {tape.constant(Tensor({half})), tape.constant(Tensor({half}))};
  for (std::size_t t = n; t-- > 0;) {
    s = lstm_cell(wb, bb, ops::row(emb, t), s);
    bwd[t] = s.h;
  }
  std::vector<Var> rows(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::array<Var, 2> pair{fwd[t], bwd[t]};
    rows[t] = ops::concat(pair);
  }
  const std::array<Var, 2> last{fwd[n - 1], bwd[0]};
  return {ops::stack_rows(rows), ops::concat(last)};
}

std::size_t entity_type_index(const Entity& e) {
  if (e.kind == EntityKind::Table) return 0;
  return 1 + 2 * static_cast<std::size_t>(e.dtype) + (e.is_primary_key ? 1 : 0);
}

Var init_entities(Tape& tape, const ParameterStore& store, const Schema& schema, const Vocabulary& vocab) {
  const std::size_t n = schema.size();
  std::vector<std::size_t> types, words;
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // (first word, count) per entity
  for (const Entity& e : schema.entities()) {
    types.push_back(entity_type_index(e));
    spans.emplace_back(words.size(), e.name_tokens.size());
    for (const std::string& t : e.name_tokens) words.push_back(vocab.id(t));
  }
  // Averaging matrix from gathered word rows to entities.
  Tensor avg({n, words.size()});
  for (std::size_t i = 0; i < n; ++i) {
    const auto [first, count] = spans[i];
    for (std::size_t k = 0; k < count; ++k) avg.at(i, first + k) = 1.0 / static_cast<double>(count);
  }
  const Var name = ops::matmul(tape.constant(std::move(avg)),
                               ops::embedding_lookup(tape.param(store, "enc.word_emb"), words));
  const Var type = ops::embedding_lookup(tape.param(store, "gnn.type_emb"), types);
  const Var w = tape.param(store, "gnn.W_init");
  std::vector<Var> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::array<Var, 2> parts{ops::row(type, i), ops::row(name, i)};
    rows.push_back(ops::concat(parts));
  }
  return ops::tanh(ops::matmul_nt(ops::stack_rows(rows), w));
}

Var gru_update(Tape& tape, const ParameterStore& store, Var h, Var x) {
  auto p = [&](const char* name) { return tape.param(store, name); };
  auto lin = [&](Var in, const char* w) { return ops::matmul_nt(in, p(w)); };
  const Var z = ops::sigmoid(ops::add_rowwise(ops::add(lin(x, "gnn.gru.W_z"), lin(h, "gnn.gru.U_z")), p("gnn.gru.b_z")));
  const Var r = ops::sigmoid(ops::add_rowwise(ops::add(lin(x, "gnn.gru.W_r"), lin(h, "gnn.gru.U_r")), p("gnn.gru.b_r")));
  const Var cand = ops::tanh(
      ops::add_rowwise(ops::add(lin(x, "gnn.gru.W_n"), ops::mul(r, lin(h, "gnn.gru.U_n"))), p("gnn.gru.b_n")));
  return ops::add(ops::mul(ops::one_minus(z), cand), ops::mul(z, h));
}

Var gnn_encode(Tape& tape, const ParameterStore& store, const Schema& schema, Var h0, std::size_t steps) {
  const std::size_t n = schema.size();
  if (h0.shape() != Shape{n, h0.shape().at(1)}) throw ConfigError("gnn_encode: initial states do not match schema");
  if (steps == 0) return h0;

  // Adjacency (target, source) and in-degree per edge group.
  static constexpr std::array<const char*, 3> kGroups = {"tc", "fp", "pf"};
  std::array<Tensor, 3> adj{Tensor({n, n}), Tensor({n, n}), Tensor({n, n})};
  std::array<Tensor, 3> deg{Tensor({n, 1}), Tensor({n, 1}), Tensor({n, 1})};
  for (const Edge& e : schema.edges()) {
    std::size_t g = 0;
    if (e.label == EdgeLabel::ForeignToPrimary) g = 1;
    if (e.label == EdgeLabel::PrimaryToForeign) g = 2;
    adj[g].at(e.target, e.source) += 1.0;
    deg[g].at(e.target, 0) += 1.0;
  }
  const std::size_t d = h0.shape()[1];
  std::array<Var, 3> a, bias;
  for (std::size_t g = 0; g < 3; ++g) {
    a[g] = tape.constant(adj[g]);
    const Var b = ops::reshape(tape.param(store, std::string("gnn.b_") + kGroups[g]), Shape{1, d});
    bias[g] = ops::matmul(tape.constant(deg[g]), b);
  }

  Var h = h0;
  for (std::size_t l = 0; l < steps; ++l) {
    Var x;
    for (std::size_t g = 0; g < 3; ++g) {
      const Var msg = ops::add(ops::matmul(a[g], ops::matmul_nt(h, tape.param(store, std::string("gnn.W_") + kGroups[g]))),
                               bias[g]);
      x = g == 0 ? msg : ops::add(x, msg);
    }
    h = gru_update(tape, store, h, x);
  }
  return h;
}

}  // namespace linkgate
