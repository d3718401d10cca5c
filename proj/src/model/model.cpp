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

#include "linkgate/model/model.hpp"

#include <cmath>

#include "linkgate/error.hpp"
#include "linkgate/tensor/ops.hpp"

namespace linkgate {

Tensor linking_matrix(const ParameterStore& store, const Vocabulary& vocab, const std::vector<std::string>& tokens,
                      const Schema& schema, const LinkingWeights& weights) {
  const Tensor& emb = store.get("enc.word_emb");
  const WordEmbedder embed = [&](const std::string& word) -> std::vector<double> {
    const std::size_t id = vocab.id(word);
    if (id == Vocabulary::kUnk) return {};
    const auto row = emb.row(id);
    return {row.begin(), row.end()};
  };
  return build_linking_matrix(tokens, schema, embed, weights);
}

Encoded encode(Tape& tape, const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
               const std::vector<std::string>& tokens, const Schema& schema) {
  Encoded out;
  out.question = encode_question(tape, store, vocab.ids(tokens));
  out.entities = gnn_encode(tape, store, schema, init_entities(tape, store, schema, vocab), config.gnn_steps);
  return out;
}

Var teacher_forced_loss(Tape& tape, const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                        const Example& example, const Tensor& linking, GateOverride override) {
  if (example.schema == nullptr) throw UsageError("example " + example.id + " has no schema");
  const Schema& schema = *example.schema;
  const Encoded enc = encode(tape, store, config, vocab, example.tokens, schema);
  DecoderRun run(tape, store, config, schema, enc.question.tokens, enc.question.final, enc.entities, linking,
                 override);
  sql::ActionReplayer replay;  // kind errors surface as zero probability below
  std::vector<Var> terms;
  terms.reserve(example.gold.size());
  for (std::size_t t = 0; t < example.gold.size(); ++t) {
    const sql::Action& a = example.gold[t];
    const sql::Frontier f = replay.frontier();
    try {
      replay.apply(a);
    } catch (const DecodeError& e) {
      throw TrainingDataError("example " + example.id + ": " + e.what());
    }
    const Var p = run.distribution(f);
    const std::size_t target = static_cast<std::size_t>(a.value);
    // NaN passes through so the trainer can report a non-finite loss.
    if (target >= p.size() || p.value()[target] <= 0.0) {
      throw TrainingDataError("example " + example.id + ": gold action " + a.to_string() + " at step " +
                              std::to_string(t) + " has zero probability");
    }
    terms.push_back(ops::log(ops::pick(p, target)));
    run.commit(a);
  }
  if (!replay.complete()) throw TrainingDataError("example " + example.id + ": gold actions form an incomplete AST");
  return ops::scale(ops::sum(ops::concat(terms)), -1.0);
}

DecodeResult greedy_decode(const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                           const std::vector<std::string>& tokens, const Schema& schema, GateOverride override) {
  Tape tape(false);
  const Encoded enc = encode(tape, store, config, vocab, tokens, schema);
  DecoderRun run(tape, store, config, schema, enc.question.tokens, enc.question.final, enc.entities,
                 linking_matrix(store, vocab, tokens, schema, config.linking), override);
  sql::ActionReplayer replay(&schema);
  DecodeResult result;
  while (!replay.complete()) {
    if (result.actions.size() >= config.max_steps) {
      result.error = "decoding exceeded " + std::to_string(config.max_steps) + " steps";
      break;
    }
    const sql::Frontier f = replay.frontier();
    const Var p = run.distribution(f);
    const auto probs = p.value().data();
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    const sql::Action a = f.is_slot() ? sql::Action::select_entity(static_cast<int>(best))
                                      : sql::Action::apply_rule(static_cast<int>(best));
    replay.apply(a);
    run.commit(a);
    result.actions.push_back(a);
  }
  if (replay.complete()) result.ast = replay.ast();
  result.trace = run.trace();
  return result;
}

}  // namespace linkgate
