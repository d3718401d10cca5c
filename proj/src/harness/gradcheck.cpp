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

#include "linkgate/harness/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "linkgate/model/model.hpp"
#include "linkgate/schema/text.hpp"
#include "linkgate/sql/sql_text.hpp"
#include "linkgate/tensor/ops.hpp"
#include "linkgate/tensor/random.hpp"

namespace linkgate::harness {
namespace {

using Builder = std::function<Var(Tape&, const std::vector<Var>&)>;

struct OpCase {
  const char* name;
  std::vector<Shape> shapes;
  Builder build;
};

// Weighted sum so every output element carries a distinct gradient.
Var reduce(Var out, Rng& rng) {
  Tensor w(out.shape());
  for (double& v : w.data()) v = rng.uniform(-1.0, 1.0);
  return ops::sum(ops::mul(out, out.tape()->constant(std::move(w))));
}

double op_error(const OpCase& c, Rng& rng, double h) {
  std::vector<Tensor> inputs;
  for (const Shape& s : c.shapes) {
    Tensor t(s);
    for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
    inputs.push_back(std::move(t));
  }
  const std::uint64_t weight_seed = rng.next();
  auto loss = [&](Tape& tape, const std::vector<Var>& vars) {
    Rng wr(weight_seed);
    return reduce(c.build(tape, vars), wr);
  };
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(tape.leaf(t));
    const Gradients g = tape.backward(loss(tape, vars));
    for (const Var& v : vars) analytic.push_back(g.of(v) ? *g.of(v) : Tensor(v.shape()));
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double orig = inputs[k][i];
      auto eval = [&](double x) {
        inputs[k][i] = x;
        Tape tape(false);
        std::vector<Var> vars;
        for (const Tensor& t : inputs) vars.push_back(tape.leaf(t, false));
        return loss(tape, vars).value()[0];
      };
      const double numeric = (eval(orig + h) - eval(orig - h)) / (2 * h);
      inputs[k][i] = orig;
      worst = std::max(worst, gradient_error(analytic[k][i], numeric));
    }
  }
  return worst;
}

std::vector<OpCase> op_cases() {
  const std::vector<bool> mask = {true, false, true, true, false};
  return {
      {"matmul", {{3, 4}, {4, 2}}, [](Tape&, const std::vector<Var>& v) { return ops::matmul(v[0], v[1]); }},
      {"matvec", {{3, 4}, {4}}, [](Tape&, const std::vector<Var>& v) { return ops::matmul(v[0], v[1]); }},
      {"matmul_nt", {{3, 4}, {2, 4}}, [](Tape&, const std::vector<Var>& v) { return ops::matmul_nt(v[0], v[1]); }},
      {"sigmoid_tanh", {{5}}, [](Tape&, const std::vector<Var>& v) { return ops::mul(ops::sigmoid(v[0]), ops::tanh(v[0])); }},
      {"softmax", {{5}}, [](Tape&, const std::vector<Var>& v) { return ops::softmax(v[0]); }},
      {"masked_softmax", {{5}}, [mask](Tape&, const std::vector<Var>& v) { return ops::masked_softmax(v[0], mask); }},
      {"log_softmax", {{5}}, [](Tape&, const std::vector<Var>& v) { return ops::log_softmax(v[0]); }},
      {"concat_stack", {{3}, {3}},
       [](Tape&, const std::vector<Var>& v) {
         const std::array<Var, 2> parts{v[0], ops::tanh(v[1])};
         return ops::add(ops::stack_rows(parts), ops::reshape(ops::concat(parts), Shape{2, 3}));
       }},
      {"gather_add_rowwise", {{4, 3}, {3}},
       [](Tape&, const std::vector<Var>& v) {
         const std::array<std::size_t, 3> ids{2, 0, 2};
         return ops::add_rowwise(ops::gather_rows(v[0], ids), v[1]);
       }},
      {"pairwise_additive_scores", {{4, 3}, {3, 6}, {3}},
       [](Tape&, const std::vector<Var>& v) { return ops::pairwise_additive_scores(v[0], v[1], v[2]); }},
      {"lstm_cell", {{12, 5}, {12}, {2}, {3}, {3}},
       [](Tape&, const std::vector<Var>& v) {
         const LstmState s = lstm_cell(v[0], v[1], v[2], {v[3], v[4]});
         const std::array<Var, 2> parts{s.h, s.c};
         return ops::concat(parts);
       }},
      {"additive_attention", {{3}, {4, 3}, {3, 3}, {3, 3}, {3}},
       [](Tape&, const std::vector<Var>& v) { return additive_attention(v[0], v[1], v[2], v[3], v[4]); }},
      {"action_embedding", {{3}, {4, 3}, {3, 6}, {3}},
       [](Tape&, const std::vector<Var>& v) { return action_embedding(v[0], v[1], v[2], v[3]).a; }},
      {"structural_mixture", {{5, 5}, {2}},
       [mask](Tape&, const std::vector<Var>& v) {
         return memory_mixture(ops::softmax(v[1]), structural_matrix(v[0], mask), {1, 3});
       }},
      {"schema_prob", {{3}, {3, 5}},
       [mask](Tape&, const std::vector<Var>& v) {
         return schema_prob(ops::softmax(v[0]), ops::softmax(v[1], 1), mask);
       }},
  };
}

struct EndToEnd {
  Schema schema;
  Example example;
};

EndToEnd fixture() {
  EndToEnd f;
  f.schema = Schema::build(
      "world",
      {{"continents", {{"contid", ColumnType::Number, true}, {"continent", ColumnType::Text, false}}},
       {"countries",
        {{"countryid", ColumnType::Number, true}, {"countryname", ColumnType::Text, false},
         {"continent", ColumnType::Number, false}}}},
      {{"countries", "continent", "continents", "contid"}});
  const char* sql =
      "select t1.contid, t1.continent, count(*) from continents as t1 join countries as t2 on t1.contid = "
      "t2.continent group by t1.contid";
  f.example = {"gradcheck", nullptr, tokenize_question("continent countries count each"),
               sql::linearize(sql::parse_sql(sql, f.schema))};
  return f;
}

}  // namespace

double gradient_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

nlohmann::json GradcheckReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass;
  j["worst_group"] = worst_group;
  j["worst_error"] = worst_error;
  j["groups"] = nlohmann::json::array();
  for (const GradcheckGroup& g : groups) {
    j["groups"].push_back({{"name", g.name}, {"size", g.size}, {"max_error", g.max_error}, {"pass", g.pass}});
  }
  return j;
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  GradcheckReport report;
  Rng rng(options.seed);
  auto add = [&](std::string name, std::size_t size, double err) {
    report.groups.push_back({std::move(name), size, err, err < options.threshold});
  };

  for (const OpCase& c : op_cases()) {
    std::size_t size = 0;
    for (const Shape& s : c.shapes) size += Tensor(s).size();
    add(std::string("op:") + c.name, size, op_error(c, rng, options.step));
  }

  EndToEnd f = fixture();
  f.example.schema = &f.schema;
  ModelConfig config;
  config.d = options.dim;
  config.gnn_steps = options.gnn_steps;
  config.gate_mode = options.gate_mode;
  Vocabulary vocab;
  for (const std::string& t : f.example.tokens) vocab.add(t);
  for (const Entity& e : f.schema.entities()) {
    for (const std::string& t : e.name_tokens) vocab.add(t);
  }
  ParameterStore store;
  init_parameters(store, config, vocab.size(), rng);
  // The linking matrix is an input of the loss, held fixed while perturbing.
  const Tensor link = linking_matrix(store, vocab, f.example.tokens, f.schema, config.linking);
  auto loss_value = [&] {
    Tape t(false);
    return teacher_forced_loss(t, store, config, vocab, f.example, link).value()[0];
  };
  std::map<std::string, Tensor> analytic;
  {
    Tape tape;
    analytic = tape.backward(teacher_forced_loss(tape, store, config, vocab, f.example, link)).params();
  }
  if (options.corrupt) options.corrupt(analytic);
  for (auto& [name, tensor] : store.all()) {
    const auto it = analytic.find(name);
    const Tensor grad = it != analytic.end() ? it->second : Tensor(tensor.shape());
    double worst = 0.0;
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double orig = tensor[i];
      tensor[i] = orig + options.step;
      const double up = loss_value();
      tensor[i] = orig - options.step;
      const double down = loss_value();
      tensor[i] = orig;
      worst = std::max(worst, gradient_error(grad[i], (up - down) / (2 * options.step)));
    }
    add("param:" + name, tensor.size(), worst);
  }

  report.pass = true;
  for (const GradcheckGroup& g : report.groups) {
    report.pass = report.pass && g.pass;
    if (g.max_error >= report.worst_error) {
      report.worst_error = g.max_error;
      report.worst_group = g.name;
    }
  }
  return report;
}

}  // namespace linkgate::harness
