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

#include <array>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linkgate/model/model.hpp"
#include "linkgate/sql/eval.hpp"

namespace linkgate::harness {

struct Bucket {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy() const { return count == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(count); }
};

struct ComponentScore {
  std::size_t gold = 0, pred = 0, matched = 0;
  // Micro-averaged F1 over the dataset; 1 when the component never occurs.
  double f1() const;
};

// Fraction of gate values outside (0.1, 0.9).
struct GateStats {
  std::size_t count = 0;
  std::size_t polarized = 0;
  double fraction() const { return count == 0 ? 0.0 : static_cast<double>(polarized) / static_cast<double>(count); }
};

struct EvalReport {
  Bucket overall;
  std::size_t decode_failures = 0;
  std::array<Bucket, sql::kHardnessCount> by_hardness{};  // from the gold query
  std::map<std::string, Bucket> by_template;              // examples with a template name
  std::array<ComponentScore, sql::kComponentCount> components{};

  // Well-formedness of successfully decoded predictions.
  std::size_t decoded = 0;
  std::size_t violating = 0;  // predictions with at least one violation
  std::array<std::size_t, 3> violations_by_kind{};
  double violation_rate() const;
  double violation_rate(sql::ViolationKind kind) const;

  GateStats rho_link, rho_copy;
  // Structural steps are gated steps with rho_link < 0.5; copy is preferred
  // when rho_copy > 0.5 there.
  std::size_t structural_steps = 0;
  std::size_t copy_preferred = 0;
  double copy_preference() const;

  nlohmann::json to_json() const;
};

// Scores predictions against gold examples. `templates` is either empty or
// parallel to `gold`. Failed decodes (no AST) count as mismatches.
EvalReport score_predictions(const std::vector<Example>& gold, const std::vector<DecodeResult>& predictions,
                             const std::vector<std::string>& templates = {});

// Greedy-decodes every example. When `traces` is given, every entity step is
// written to it as one JSON line.
EvalReport evaluate(const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                    const std::vector<Example>& examples, const std::vector<std::string>& templates = {},
                    std::ostream* traces = nullptr);

// Exact-set-match accuracy only.
double accuracy(const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                const std::vector<Example>& examples);

// {example_id, step, nonterminal, rho_link, rho_copy, lambda_argmax_token,
//  beta_link_argmax_slot, chosen_entity, p_schema, p_struct}; gates are null
// when not applicable.
nlohmann::json trace_record(const std::string& example_id, const GateTraceEntry& entry,
                            const std::vector<std::string>& tokens, const Schema& schema);

struct Inspection {
  DecodeResult decode;
  std::string sql;                 // empty when decoding failed
  std::string annotated;           // human-readable block
  std::vector<nlohmann::json> trace;
};

Inspection inspect(const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                   const std::string& question, const Schema& schema, const std::string& example_id = "query");

}  // namespace linkgate::harness
