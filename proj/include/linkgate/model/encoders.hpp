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
#include <vector>

#include "linkgate/model/config.hpp"
#include "linkgate/model/vocabulary.hpp"
#include "linkgate/schema/schema.hpp"
#include "linkgate/tensor/tape.hpp"

namespace linkgate {

struct LstmState {
  Var h;
  Var c;
};

// One LSTM step with gate order (input, forget, candidate, output):
// z = W [x; h] + b, c' = f*c + i*g, h' = o*tanh(c').
LstmState lstm_cell(Var w, Var b, Var x, const LstmState& state);

struct EncodedQuestion {
  Var tokens;  // |Q| x d, forward and backward states concatenated per token
  Var final;   // d: last forward state followed by first backward state
};

// Bidirectional LSTM over word embeddings of the token ids. Throws
// UsageError on an empty question.
EncodedQuestion encode_question(Tape& tape, const ParameterStore& store, const std::vector<std::size_t>& token_ids);

// Type-embedding row of an entity: 0 for tables, otherwise
// 1 + 2 * dtype + primary flag.
std::size_t entity_type_index(const Entity& e);

// h0 rows = tanh(W_init [type_emb; mean of own name-token embeddings]).
Var init_entities(Tape& tape, const ParameterStore& store, const Schema& schema, const Vocabulary& vocab);

// L rounds of message passing: x = sum over incoming edges of W_g h_s + b_g
// for the edge group g, followed by a GRU update of every entity.
Var gnn_encode(Tape& tape, const ParameterStore& store, const Schema& schema, Var h0, std::size_t steps);

// GRU update used by gnn_encode: z = s(XWz' + HUz' + bz), r = s(XWr' + HUr' + br),
// n = tanh(XWn' + r*(HUn') + bn), H' = (1-z)*n + z*H.
Var gru_update(Tape& tape, const ParameterStore& store, Var h, Var x);

}  // namespace linkgate
