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

#include <optional>
#include <string>
#include <vector>

#include "linkgate/model/config.hpp"
#include "linkgate/model/decoder.hpp"
#include "linkgate/model/encoders.hpp"
#include "linkgate/model/vocabulary.hpp"
#include "linkgate/schema/schema.hpp"
#include "linkgate/sql/ast.hpp"

namespace linkgate {

// A question paired with its gold action sequence over one schema.
struct Example {
  std::string id;
  const Schema* schema = nullptr;
  std::vector<std::string> tokens;
  std::vector<sql::Action> gold;
};

// Linking matrix for a question, using the current word embeddings for the
// cosine feature; tokens without a vocabulary entry contribute no cosine.
Tensor linking_matrix(const ParameterStore& store, const Vocabulary& vocab, const std::vector<std::string>& tokens,
                      const Schema& schema, const LinkingWeights& weights);

struct Encoded {
  EncodedQuestion question;
  Var entities;  // H_V
};

Encoded encode(Tape& tape, const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
               const std::vector<std::string>& tokens, const Schema& schema);

// Sum over gold actions of -log probability. Throws TrainingDataError naming
// the example when a gold action has zero probability.
Var teacher_forced_loss(Tape& tape, const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                        const Example& example, const Tensor& linking, GateOverride override = {});

struct DecodeResult {
  std::optional<sql::SqlAst> ast;
  std::vector<sql::Action> actions;
  std::vector<GateTraceEntry> trace;
  std::string error;  // set when decoding failed
};

// Greedy decoding under the grammar mask; ties go to the lowest id.
DecodeResult greedy_decode(const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                           const std::vector<std::string>& tokens, const Schema& schema,
                           GateOverride override = {});

}  // namespace linkgate
