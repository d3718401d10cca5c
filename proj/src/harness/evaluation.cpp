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

#include "linkgate/harness/evaluation.hpp"

#include <cstdio>
#include <sstream>

#include "linkgate/error.hpp"
#include "linkgate/schema/text.hpp"
#include "linkgate/sql/grammar.hpp"
#include "linkgate/sql/sql_text.hpp"

namespace linkgate::harness {
namespace {

bool polarized(double rho) { return rho <= 0.1 || rho >= 0.9; }

nlohmann::json bucket_json(const Bucket& b) {
  return {{"count", b.count}, {"correct", b.correct}, {"accuracy", b.accuracy()}};
}

nlohmann::json gate_json(const GateStats& g) {
  return {{"count", g.count}, {"polarized", g.polarized}, {"fraction", g.fraction()}};
}

std::string gate_text(const std::optional<double>& rho) {
  if (!rho) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *rho);
  return buf;
}

}  // namespace

double ComponentScore::f1() const {
  if (gold + pred == 0) return 1.0;
  return 2.0 * static_cast<double>(matched) / static_cast<double>(gold + pred);
}

double EvalReport::violation_rate() const {
  return decoded == 0 ? 0.0 : static_cast<double>(violating) / static_cast<double>(decoded);
}

double EvalReport::violation_rate(sql::ViolationKind kind) const {
  const std::size_t n = violations_by_kind[static_cast<std::size_t>(kind)];
  return decoded == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(decoded);
}

double EvalReport::copy_preference() const {
  return structural_steps == 0 ? 0.0 : static_cast<double>(copy_preferred) / static_cast<double>(structural_steps);
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["examples"] = overall.count;
  j["correct"] = overall.correct;
  j["accuracy"] = overall.accuracy();
  j["decode_failures"] = decode_failures;
  for (std::size_t h = 0; h < sql::kHardnessCount; ++h) {
    j["hardness"][std::string(sql::hardness_name(static_cast<sql::Hardness>(h)))] = bucket_json(by_hardness[h]);
  }
  j["templates"] = nlohmann::json::object();
  for (const auto& [name, b] : by_template) j["templates"][name] = bucket_json(b);
  for (std::size_t c = 0; c < sql::kComponentCount; ++c) {
    const ComponentScore& s = components[c];
    j["partial_match"][std::string(sql::component_name(sql::kComponents[c]))] = {
        {"gold", s.gold}, {"pred", s.pred}, {"matched", s.matched}, {"f1", s.f1()}};
  }
  nlohmann::json wf = {{"decoded", decoded}, {"violating", violating}, {"rate", violation_rate()}};
  for (std::size_t k = 0; k < violations_by_kind.size(); ++k) {
    const auto kind = static_cast<sql::ViolationKind>(k);
    wf["by_kind"][std::string(sql::violation_name(kind))] = {{"count", violations_by_kind[k]},
                                                             {"rate", violation_rate(kind)}};
  }
  j["wellformedness"] = wf;
  j["gates"] = {{"rho_link", gate_json(rho_link)},
                {"rho_copy", gate_json(rho_copy)},
                {"structural_steps", structural_steps},
                {"copy_preferred", copy_preferred},
                {"copy_preference", copy_preference()}};
  return j;
}

EvalReport score_predictions(const std::vector<Example>& gold, const std::vector<DecodeResult>& predictions,
                             const std::vector<std::string>& templates) {
  if (predictions.size() != gold.size()) throw UsageError("score_predictions: prediction count mismatch");
  if (!templates.empty() && templates.size() != gold.size()) throw UsageError("score_predictions: template count mismatch");
  EvalReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const sql::SqlAst gold_ast = sql::delinearize(gold[i].gold, gold[i].schema);
    const DecodeResult& p = predictions[i];
    const bool correct = p.ast && sql::exact_set_match(*p.ast, gold_ast);

    auto tally = [correct](Bucket& b) {
      ++b.count;
      if (correct) ++b.correct;
    };
    tally(r.overall);
    tally(r.by_hardness[static_cast<std::size_t>(sql::classify_hardness(gold_ast))]);
    if (!templates.empty() && !templates[i].empty()) tally(r.by_template[templates[i]]);

    if (p.ast) {
      const sql::PartialMatch pm = sql::partial_match(*p.ast, gold_ast);
      for (std::size_t c = 0; c < sql::kComponentCount; ++c) {
        r.components[c].gold += pm[c].gold;
        r.components[c].pred += pm[c].pred;
        r.components[c].matched += pm[c].matched;
      }
      ++r.decoded;
      const auto violations = sql::validate_wellformedness(*p.ast, gold[i].schema);
      if (!violations.empty()) ++r.violating;
      std::array<bool, 3> seen{};
      for (const sql::Violation& v : violations) seen[static_cast<std::size_t>(v.kind)] = true;
      for (std::size_t k = 0; k < seen.size(); ++k) r.violations_by_kind[k] += seen[k] ? 1 : 0;
    } else {
      ++r.decode_failures;
      const sql::PartialMatch pm = sql::partial_match(gold_ast, gold_ast);
      for (std::size_t c = 0; c < sql::kComponentCount; ++c) r.components[c].gold += pm[c].gold;
    }

    for (const GateTraceEntry& e : p.trace) {
      if (e.rho_link) {
        ++r.rho_link.count;
        if (polarized(*e.rho_link)) ++r.rho_link.polarized;
      }
      if (e.rho_copy) {
        ++r.rho_copy.count;
        if (polarized(*e.rho_copy)) ++r.rho_copy.polarized;
      }
      if (e.rho_link && *e.rho_link < 0.5 && e.rho_copy) {
        ++r.structural_steps;
        if (*e.rho_copy > 0.5) ++r.copy_preferred;
      }
    }
  }
  return r;
}

EvalReport evaluate(const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                    const std::vector<Example>& examples, const std::vector<std::string>& templates,
                    std::ostream* traces) {
  std::vector<DecodeResult> predictions;
  predictions.reserve(examples.size());
  for (const Example& ex : examples) {
    predictions.push_back(greedy_decode(store, config, vocab, ex.tokens, *ex.schema));
    if (traces) {
      for (const GateTraceEntry& e : predictions.back().trace) {
        *traces << trace_record(ex.id, e, ex.tokens, *ex.schema).dump() << '\n';
      }
    }
  }
  return score_predictions(examples, predictions, templates);
}

double accuracy(const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                const std::vector<Example>& examples) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const Example& ex : examples) {
    const DecodeResult r = greedy_decode(store, config, vocab, ex.tokens, *ex.schema);
    if (r.ast && sql::exact_set_match(*r.ast, sql::delinearize(ex.gold, ex.schema))) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

nlohmann::json trace_record(const std::string& example_id, const GateTraceEntry& e,
                            const std::vector<std::string>& tokens, const Schema& schema) {
  nlohmann::json j;
  j["example_id"] = example_id;
  j["step"] = e.step;
  j["nonterminal"] = std::string(sql::nonterminal_name(e.nonterminal));
  j["rho_link"] = e.rho_link ? nlohmann::json(*e.rho_link) : nlohmann::json(nullptr);
  j["rho_copy"] = e.rho_copy ? nlohmann::json(*e.rho_copy) : nlohmann::json(nullptr);
  j["lambda_argmax_token"] = e.lambda_argmax < tokens.size() ? tokens[e.lambda_argmax] : std::string();
  j["beta_link_argmax_slot"] = e.beta_link_argmax ? nlohmann::json(*e.beta_link_argmax) : nlohmann::json(nullptr);
  j["chosen_entity"] = schema.qualified_name(static_cast<std::size_t>(e.chosen_entity));
  j["p_schema"] = e.p_schema;
  j["p_struct"] = e.p_struct;
  return j;
}

Inspection inspect(const ParameterStore& store, const ModelConfig& config, const Vocabulary& vocab,
                   const std::string& question, const Schema& schema, const std::string& example_id) {
  Inspection out;
  const std::vector<std::string> tokens = tokenize_question(question);
  out.decode = greedy_decode(store, config, vocab, tokens, schema);
  std::ostringstream text;
  text << "question: " << question << '\n';
  if (out.decode.ast) {
    out.sql = sql::render_sql(*out.decode.ast, schema);
    text << "sql: " << out.sql << '\n';
  } else {
    text << "sql: <decode failed: " << out.decode.error << ">\n";
  }
  char line[160];
  std::snprintf(line, sizeof line, "%-32s %-10s %-10s %s\n", "entity", "rho_link", "rho_copy", "attended token");
  text << line;
  for (const GateTraceEntry& e : out.decode.trace) {
    out.trace.push_back(trace_record(example_id, e, tokens, schema));
    const std::string token = e.lambda_argmax < tokens.size() ? tokens[e.lambda_argmax] : "";
    std::snprintf(line, sizeof line, "%-32s %-10s %-10s %s\n",
                  schema.qualified_name(static_cast<std::size_t>(e.chosen_entity)).c_str(),
                  gate_text(e.rho_link).c_str(), gate_text(e.rho_copy).c_str(), token.c_str());
    text << line;
  }
  out.annotated = text.str();
  return out;
}

}  // namespace linkgate::harness
