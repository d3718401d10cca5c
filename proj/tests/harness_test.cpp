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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "linkgate/error.hpp"
#include "linkgate/harness/corpus.hpp"
#include "linkgate/harness/evaluation.hpp"
#include "linkgate/harness/gradcheck.hpp"
#include "linkgate/harness/trainer.hpp"
#include "linkgate/schema/text.hpp"
#include "linkgate/sql/sql_text.hpp"
#include "linkgate/tensor/random.hpp"

using namespace linkgate;
using namespace linkgate::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("linkgate_harness_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Corpus small_corpus(std::uint64_t seed = 3, std::size_t train = 40, std::size_t dev = 10) {
  return generate_corpus({seed, 6, train, dev});
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.model.d = 16;
  c.lr = 0.01;
  c.epochs = 3;
  c.batch_size = 4;
  return c;
}

bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TEST_CASE("corpus generation is deterministic") {
  const Corpus a = small_corpus(), b = small_corpus();
  CHECK(a.schemas == b.schemas);
  CHECK(a.train == b.train);
  CHECK(a.dev == b.dev);
  CHECK(small_corpus(4).train != a.train);

  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  write_corpus(d1, a);
  write_corpus(d2, b);
  CHECK(read_bytes(d1 / "train.jsonl") == read_bytes(d2 / "train.jsonl"));
  CHECK(read_bytes(d1 / "schemas" / "train_db_0.json") == read_bytes(d2 / "schemas" / "train_db_0.json"));

  const Corpus back = read_corpus(d1);
  CHECK(back.schemas == a.schemas);
  CHECK(back.train == a.train);
  CHECK(back.dev == a.dev);
  CHECK_THROWS_AS(generate_corpus({1, 1, 5, 5}), UsageError);
}

TEST_CASE("corpus schemas and splits") {
  const Corpus c = generate_corpus({9, 20, 300, 60});
  CHECK(c.schemas.size() == 20);
  std::set<std::string> train_dbs, dev_dbs;
  for (const auto& e : c.train) train_dbs.insert(e.db_id);
  for (const auto& e : c.dev) dev_dbs.insert(e.db_id);
  for (const std::string& db : dev_dbs) CHECK(train_dbs.count(db) == 0);
  CHECK(dev_dbs.size() <= dev_schema_count(20));

  for (const auto& [id, s] : c.schemas) {
    CHECK(s.table_count() >= 2);
    CHECK(s.table_count() <= 5);
    CHECK(s.foreign_keys().size() == s.table_count() - 1);
    for (std::size_t t : s.tables()) {
      CHECK(s.columns_of(t).size() >= 2);
      CHECK(s.columns_of(t).size() <= 6);
    }
    // Foreign keys connect every table (a tree on n tables has n - 1 edges).
    std::vector<std::size_t> group(s.size());
    for (std::size_t i = 0; i < group.size(); ++i) group[i] = i;
    std::function<std::size_t(std::size_t)> root = [&](std::size_t x) { return group[x] == x ? x : root(group[x]); };
    for (const auto& [fk, pk] : s.foreign_keys()) group[root(s.entity(fk).table)] = root(s.entity(pk).table);
    std::set<std::size_t> roots;
    for (std::size_t t : s.tables()) roots.insert(root(t));
    CHECK(roots.size() == 1);
  }

  std::set<std::string> used;
  for (const auto& e : c.train) used.insert(e.template_name);
  CHECK(used.size() == template_names().size());
  CHECK(template_names().size() >= 8);
}

TEST_CASE("every generated example round-trips and hides join keys") {
  const Corpus c = generate_corpus({21, 12, 400, 100});
  std::vector<DatasetExample> all = c.train;
  all.insert(all.end(), c.dev.begin(), c.dev.end());
  std::size_t joins = 0;
  for (const DatasetExample& e : all) {
    INFO(e.sql);
    const Schema& s = c.schemas.at(e.db_id);
    const sql::SqlAst ast = sql::parse_sql(e.sql, s);
    const sql::SqlAst back = sql::delinearize(sql::linearize(ast), &s);
    const std::string text = sql::render_sql(back, s);
    CHECK(text == e.sql);
    CHECK(sql::parse_sql(text, s) == ast);

    const std::vector<std::string> q = tokenize_question(e.question);
    const sql::Statement st = sql::statement_from_ast(ast);
    for (const sql::Query* query : sql::all_queries(st)) {
      std::vector<int> keys;
      for (const sql::Join& j : query->joins) {
        keys.push_back(j.left);
        keys.push_back(j.right);
      }
      if (query->group_by && !query->joins.empty()) keys.push_back(query->group_by->column);
      if (!query->joins.empty()) ++joins;
      for (int k : keys) CHECK_FALSE(contains_sequence(q, s.entity(static_cast<std::size_t>(k)).name_tokens));
    }
    // Mentioned entities: every table in FROM appears by name.
    for (int t : st.left.tables()) CHECK(contains_sequence(q, s.entity(static_cast<std::size_t>(t)).name_tokens));
  }
  CHECK(joins > 50);
}

TEST_CASE("training config text and json") {
  const TrainConfig c = parse_train_config(
      "# comment\nseed = 11\nd = 32\nL = 1\nlr = 0.002  # trailing\nbatch_size=2\ngate_mode = no-copy\n"
      "remove_generated = true\nw_exact = 4.5\nmonitor = train\n");
  CHECK(c.seed == 11);
  CHECK(c.model.d == 32);
  CHECK(c.model.gnn_steps == 1);
  CHECK(c.lr == 0.002);
  CHECK(c.batch_size == 2);
  CHECK(c.model.gate_mode == GateMode::NoCopy);
  CHECK(c.model.remove_generated);
  CHECK(c.model.linking.exact == 4.5);
  CHECK(c.monitor == Monitor::Train);
  CHECK(parse_train_config(format_train_config(c)) == c);
  CHECK(train_config_from_json(to_json(c)) == c);
  CHECK(parse_train_config("") == TrainConfig{});

  CHECK_THROWS_AS(parse_train_config("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("d = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("d = 7\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("lr = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("gate_mode = sometimes\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("just words\n"), ConfigError);
}

TEST_CASE("checkpoints round-trip and are byte-stable") {
  const Corpus c = small_corpus();
  Trainer t(tiny_config(), to_model_examples(c.train, c.schemas), {});
  REQUIRE(t.train_epoch().has_value());
  const fs::path dir = scratch("ckpt");
  save_state(dir / "a.ckpt", t.state());
  const TrainState back = load_state(dir / "a.ckpt");
  CHECK(back.config == t.state().config);
  CHECK(back.vocab == t.state().vocab);
  CHECK(back.params.all() == t.state().params.all());
  CHECK(back.adam.steps() == t.state().adam.steps());
  CHECK(back.adam.first_moments() == t.state().adam.first_moments());
  save_state(dir / "b.ckpt", back);
  CHECK(read_bytes(dir / "a.ckpt") == read_bytes(dir / "b.ckpt"));

  std::ofstream(dir / "junk.ckpt") << "not a checkpoint";
  CHECK_THROWS_AS(load_state(dir / "junk.ckpt"), LoadError);
}

TEST_CASE("training lowers the loss, resumes exactly, and is deterministic") {
  const Corpus c = small_corpus(5, 12, 4);
  const auto train = to_model_examples(c.train, c.schemas);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 12;
  cfg.patience = 100;
  cfg.eval_every = 4;

  const fs::path dir = scratch("train");
  Trainer a(cfg, train, {});
  TrainOptions opts;
  opts.best_path = dir / "best.ckpt";
  const TrainResult r = a.run(opts);
  CHECK(r.epochs == 12);
  const auto& h = a.state().history;
  REQUIRE(h.size() == 12);
  CHECK(h.back().loss <= h.front().loss);
  CHECK(h[3].accuracy.has_value());
  CHECK_FALSE(h[4].accuracy.has_value());
  CHECK(fs::exists(dir / "best.ckpt"));

  // Resume from the state after two epochs and compare the third.
  Trainer b(cfg, train, {});
  b.train_epoch();
  b.state().epoch = 1;
  b.train_epoch();
  b.state().epoch = 2;
  save_state(dir / "two.ckpt", b.state());
  const std::optional<double> direct = b.train_epoch();
  Trainer resumed(load_state(dir / "two.ckpt"), train, {});
  const std::optional<double> again = resumed.train_epoch();
  REQUIRE(direct.has_value());
  CHECK(*again == *direct);
  CHECK(resumed.state().params.all() == b.state().params.all());

  Trainer a2(cfg, train, {});
  TrainOptions opts2;
  opts2.best_path = dir / "best2.ckpt";
  a2.run(opts2);
  CHECK(read_bytes(dir / "best.ckpt") == read_bytes(dir / "best2.ckpt"));
}

TEST_CASE("early stopping and target accuracy") {
  const Corpus c = small_corpus(6, 8, 4);
  const auto train = to_model_examples(c.train, c.schemas);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 50;
  cfg.patience = 2;
  cfg.lr = 1e-9;  // nothing improves after the first evaluation
  Trainer t(cfg, train, {});
  const TrainResult r = t.run();
  CHECK(r.status == TrainStatus::EarlyStopped);
  CHECK(r.epochs == 3);

  cfg.target_accuracy = 0.0;
  Trainer u(cfg, train, {});
  CHECK(u.run().status == TrainStatus::TargetReached);
  CHECK(u.state().epoch == 1);
}

TEST_CASE("non-finite loss aborts and keeps the last good state") {
  const Corpus c = small_corpus(7, 8, 4);
  TrainConfig cfg = tiny_config();
  Trainer t(cfg, to_model_examples(c.train, c.schemas), {});
  const ParameterStore before = t.state().params;
  t.state().params.get("dec.rule_emb")[0] = std::nan("");
  const fs::path dir = scratch("nan");
  TrainOptions opts;
  opts.best_path = dir / "best.ckpt";
  const TrainResult r = t.run(opts);
  CHECK(r.status == TrainStatus::NonFinite);
  CHECK(r.epochs == 0);
  REQUIRE(fs::exists(dir / "best.ckpt"));
  CHECK(load_state(dir / "best.ckpt").epoch == 0);
}

TEST_CASE("schema-only training leaves structural parameters untouched") {
  const Corpus c = small_corpus(8, 16, 4);
  TrainConfig cfg = tiny_config();
  cfg.model.gate_mode = GateMode::SchemaOnly;
  Trainer t(cfg, to_model_examples(c.train, c.schemas), {});
  const ParameterStore before = t.state().params;
  t.train_epoch();
  std::size_t changed = 0;
  for (const auto& [name, value] : t.state().params.all()) {
    const bool structural = name.rfind("dec.copy_gate", 0) == 0 || name.rfind("dec.att_", 0) == 0 ||
                            name.rfind("dec.link_gate", 0) == 0 || name.rfind("dec.struct", 0) == 0;
    if (structural) {
      CHECK_MESSAGE(value == before.get(name), name);
    } else if (!(value == before.get(name))) {
      ++changed;
    }
  }
  CHECK(changed > 10);
}

TEST_CASE("evaluation report") {
  const Corpus c = small_corpus(10, 30, 30);
  const auto dev = to_model_examples(c.dev, c.schemas);
  std::vector<std::string> templates;
  for (const auto& e : c.dev) templates.push_back(e.template_name);

  SUBCASE("gold predictions score perfectly") {
    std::vector<DecodeResult> gold;
    for (const Example& ex : dev) gold.push_back({sql::delinearize(ex.gold, ex.schema), ex.gold, {}, ""});
    const EvalReport r = score_predictions(dev, gold, templates);
    CHECK(r.overall.accuracy() == 1.0);
    for (const ComponentScore& s : r.components) CHECK(s.f1() == 1.0);
    CHECK(r.violation_rate() == 0.0);
  }

  SUBCASE("untrained model") {
    Trainer t(tiny_config(), to_model_examples(c.train, c.schemas), {});
    std::ostringstream traces;
    const EvalReport r =
        evaluate(t.state().params, t.state().config.model, t.state().vocab, dev, templates, &traces);
    CHECK(r.overall.count == dev.size());
    CHECK(r.overall.accuracy() <= 0.2);
    CHECK(r.decoded + r.decode_failures == dev.size());
    std::size_t total = 0;
    double weighted = 0.0;
    for (const Bucket& b : r.by_hardness) {
      total += b.count;
      weighted += b.accuracy() * static_cast<double>(b.count);
    }
    CHECK(total == dev.size());
    CHECK(std::abs(weighted / static_cast<double>(total) - r.overall.accuracy()) < 1e-12);
    std::size_t by_template = 0;
    for (const auto& [name, b] : r.by_template) by_template += b.count;
    CHECK(by_template == dev.size());
    CHECK(r.violation_rate() >= 0.0);
    CHECK(r.violation_rate() <= 1.0);
    CHECK(r.rho_link.fraction() >= 0.0);
    CHECK(r.rho_link.fraction() <= 1.0);
    CHECK(r.rho_link.count > 0);

    const nlohmann::json j = r.to_json();
    CHECK(j.at("examples") == dev.size());
    CHECK(j.at("gates").at("rho_link").at("count") == r.rho_link.count);
    CHECK(j.at("hardness").size() == 4);

    std::istringstream lines(traces.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
      const nlohmann::json rec = nlohmann::json::parse(line);
      CHECK(rec.size() == 10);
      for (const char* key : {"example_id", "step", "nonterminal", "rho_link", "rho_copy", "lambda_argmax_token",
                              "beta_link_argmax_slot", "chosen_entity", "p_schema", "p_struct"}) {
        CHECK(rec.contains(key));
      }
      ++n;
    }
    CHECK(n > dev.size());
  }

  SUBCASE("decode failures are mismatches") {
    std::vector<DecodeResult> none(dev.size());
    const EvalReport r = score_predictions(dev, none);
    CHECK(r.overall.correct == 0);
    CHECK(r.decode_failures == dev.size());
    CHECK(r.decoded == 0);
    CHECK(r.by_template.empty());
  }
}

TEST_CASE("inspect annotates gates") {
  const Corpus c = small_corpus(12, 20, 5);
  Trainer t(tiny_config(), to_model_examples(c.train, c.schemas), {});
  const DatasetExample& ex = c.train[0];
  const Inspection r = inspect(t.state().params, t.state().config.model, t.state().vocab, ex.question,
                               c.schemas.at(ex.db_id), ex.id);
  INFO(r.decode.error);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.size() == r.decode.trace.size());
  CHECK(r.trace[0].at("rho_link").is_null());
  CHECK(r.trace[0].at("rho_copy").is_null());
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const GateTraceEntry& e = r.decode.trace[i];
    if (e.rho_link) CHECK(r.trace[i].at("rho_link").get<double>() == *e.rho_link);
    CHECK(r.trace[i].at("p_schema").get<double>() == e.p_schema);
  }
  CHECK(r.annotated.find("sql: " + r.sql) != std::string::npos);
  // Header line, then one line per entity; the first carries N/A twice.
  std::istringstream lines(r.annotated);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 3 + r.trace.size());
  CHECK(rows[3].find("N/A        N/A") != std::string::npos);
}

TEST_CASE("gradcheck report") {
  const GradcheckReport r = run_gradcheck();
  CHECK(r.pass);
  CHECK(r.worst_error < 1e-4);
  ParameterStore store;
  Rng rng(1);
  init_parameters(store, [] { ModelConfig m; m.d = 8; return m; }(), 20, rng);
  std::multiset<std::string> names;
  for (const GradcheckGroup& g : r.groups) {
    if (g.name.rfind("param:", 0) == 0) names.insert(g.name.substr(6));
  }
  CHECK(names.size() == store.all().size());
  for (const auto& [name, t] : store.all()) CHECK(names.count(name) == 1);

  GradcheckOptions bad;
  bad.corrupt = [](std::map<std::string, Tensor>& g) { g.at("dec.struct.v_alpha")[0] += 0.5; };
  const GradcheckReport f = run_gradcheck(bad);
  CHECK_FALSE(f.pass);
  CHECK(f.worst_group == "param:dec.struct.v_alpha");
  for (const GradcheckGroup& g : f.groups) CHECK(g.pass == (g.name != "param:dec.struct.v_alpha"));
}
