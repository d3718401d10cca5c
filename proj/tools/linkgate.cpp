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

// Command-line front end: corpus generation, training, evaluation, decoding
// and gradient checks. Exit status 0 on success, 1 on usage or input errors,
// 2 when a check (gradcheck, --min-accuracy) fails.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "linkgate/error.hpp"
#include "linkgate/harness/corpus.hpp"
#include "linkgate/harness/evaluation.hpp"
#include "linkgate/harness/gradcheck.hpp"
#include "linkgate/harness/trainer.hpp"

namespace fs = std::filesystem;
using namespace linkgate;
using namespace linkgate::harness;

namespace {

constexpr int kCheckFailed = 2;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << text;
}

const Schema& find_schema(const std::map<std::string, Schema>& schemas, const std::string& db) {
  const auto it = schemas.find(db);
  if (it == schemas.end()) throw LookupError("unknown database '" + db + "'");
  return it->second;
}

struct GenArgs {
  CorpusOptions options;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const Corpus corpus = generate_corpus(a.options);
  write_corpus(a.out, corpus);
  std::cout << "wrote " << corpus.schemas.size() << " schemas, " << corpus.train.size() << " train and "
            << corpus.dev.size() << " dev examples to " << a.out << '\n';
  return 0;
}

struct TrainArgs {
  std::string config, data, out, resume, last;
};

int run_train(const TrainArgs& a) {
  const Corpus corpus = read_corpus(a.data);
  std::vector<Example> train = to_model_examples(corpus.train, corpus.schemas);
  std::vector<Example> dev = to_model_examples(corpus.dev, corpus.schemas);
  std::optional<Trainer> trainer;
  if (!a.resume.empty()) {
    trainer.emplace(load_state(a.resume), std::move(train), std::move(dev));
  } else {
    const TrainConfig config = a.config.empty() ? TrainConfig{} : load_train_config(a.config);
    std::vector<Example> monitor = config.monitor == Monitor::Train ? std::vector<Example>{} : std::move(dev);
    trainer.emplace(config, std::move(train), std::move(monitor));
  }
  TrainOptions options;
  options.best_path = fs::path(a.out);
  if (!a.last.empty()) options.last_path = fs::path(a.last);
  options.log = &std::cout;
  const TrainResult r = trainer->run(options);
  std::cout << "status " << train_status_name(r.status) << " after " << r.epochs << " epochs; best accuracy "
            << r.best_accuracy << " at epoch " << r.best_epoch << '\n';
  return r.status == TrainStatus::NonFinite ? 1 : 0;
}

struct EvalArgs {
  std::string ckpt, data, schemas, report, traces;
  double min_accuracy = -1.0;
};

int run_eval(const EvalArgs& a) {
  const TrainState state = load_state(a.ckpt);
  const fs::path schema_dir = a.schemas.empty() ? fs::path(a.data).parent_path() / "schemas" : fs::path(a.schemas);
  const auto schemas = read_schemas(schema_dir);
  const auto data = read_dataset(a.data);
  const std::vector<Example> examples = to_model_examples(data, schemas);
  std::vector<std::string> templates;
  for (const DatasetExample& d : data) templates.push_back(d.template_name);
  std::optional<std::ofstream> traces;
  if (!a.traces.empty()) {
    traces.emplace(a.traces, std::ios::binary);
    if (!*traces) throw LoadError("cannot write " + a.traces);
  }
  const EvalReport report =
      evaluate(state.params, state.config.model, state.vocab, examples, templates, traces ? &*traces : nullptr);
  const std::string text = report.to_json().dump(2) + "\n";
  if (a.report.empty()) {
    std::cout << text;
  } else {
    write_text(a.report, text);
    std::cout << "accuracy " << report.overall.accuracy() << " on " << report.overall.count << " examples\n";
  }
  if (a.min_accuracy >= 0 && report.overall.accuracy() < a.min_accuracy) {
    std::cerr << "accuracy " << report.overall.accuracy() << " is below " << a.min_accuracy << '\n';
    return kCheckFailed;
  }
  return 0;
}

struct DecodeArgs {
  std::string ckpt, schemas, db, question, trace;
};

int run_parse(const DecodeArgs& a, bool annotate) {
  const TrainState state = load_state(a.ckpt);
  const auto schemas = read_schemas(a.schemas);
  const Schema& schema = find_schema(schemas, a.db);
  const Inspection r = inspect(state.params, state.config.model, state.vocab, a.question, schema);
  if (annotate) {
    std::cout << r.annotated;
    for (const nlohmann::json& j : r.trace) std::cout << j.dump() << '\n';
  } else if (r.decode.ast) {
    std::cout << r.sql << '\n';
  } else {
    std::cerr << "decode failed: " << r.decode.error << '\n';
  }
  if (!a.trace.empty()) {
    std::string lines;
    for (const nlohmann::json& j : r.trace) lines += j.dump() + "\n";
    write_text(a.trace, lines);
  }
  return r.decode.ast ? 0 : 1;
}

struct GradArgs {
  GradcheckOptions options;
  std::string gate_mode = "dynamic";
  std::string report;
};

int run_gradcheck_cmd(GradArgs a) {
  a.options.gate_mode = parse_gate_mode(a.gate_mode);
  const GradcheckReport r = run_gradcheck(a.options);
  for (const GradcheckGroup& g : r.groups) {
    std::printf("%-4s %-36s %8zu  %.3e\n", g.pass ? "ok" : "FAIL", g.name.c_str(), g.size, g.max_error);
  }
  std::printf("worst %s %.3e -> %s\n", r.worst_group.c_str(), r.worst_error, r.pass ? "PASS" : "FAIL");
  if (!a.report.empty()) write_text(a.report, r.to_json().dump(2) + "\n");
  return r.pass ? 0 : kCheckFailed;
}

struct ImportArgs {
  std::string tables, db, out;
};

int run_import(const ImportArgs& a) {
  save_schema(a.out, import_spider_tables(a.tables, a.db));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-to-SQL with gated schema linking"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic corpus");
  gen_cmd->add_option("--seed", gen.options.seed, "Random seed");
  gen_cmd->add_option("--schemas", gen.options.schemas, "Number of databases (train and dev)");
  gen_cmd->add_option("--train", gen.options.train_examples, "Training examples");
  gen_cmd->add_option("--dev", gen.options.dev_examples, "Dev examples");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--config", train.config, "key = value config file")->check(CLI::ExistingFile);
  train_cmd->add_option("--data", train.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--out", train.out, "Best checkpoint path")->required();
  train_cmd->add_option("--resume", train.resume, "Continue from this checkpoint")->check(CLI::ExistingFile);
  train_cmd->add_option("--last", train.last, "Also write the latest state here after every epoch");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a JSONL dataset");
  eval_cmd->add_option("--ckpt", eval.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval.data, "Dataset (.jsonl)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--schemas", eval.schemas, "Schema directory (default: <data dir>/schemas)");
  eval_cmd->add_option("--report", eval.report, "Write the JSON report here instead of stdout");
  eval_cmd->add_option("--traces", eval.traces, "Write gate traces (JSONL) here");
  eval_cmd->add_option("--min-accuracy", eval.min_accuracy, "Exit with status 2 below this accuracy");

  DecodeArgs parse;
  auto* parse_cmd = app.add_subcommand("parse", "Translate one question");
  DecodeArgs insp;
  auto* inspect_cmd = app.add_subcommand("inspect", "Translate one question and show gate values");
  for (auto [cmd, args] : {std::pair{parse_cmd, &parse}, std::pair{inspect_cmd, &insp}}) {
    cmd->add_option("--ckpt", args->ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
    cmd->add_option("--schemas", args->schemas, "Schema directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--db", args->db, "Database id")->required();
    cmd->add_option("--question", args->question, "Question text")->required();
    cmd->add_option("--trace", args->trace, "Write the gate trace (JSONL) here");
  }

  GradArgs grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  grad_cmd->add_option("--dim", grad.options.dim, "Hidden size");
  grad_cmd->add_option("--seed", grad.options.seed, "Random seed");
  grad_cmd->add_option("--gate-mode", grad.gate_mode, "dynamic | schema-only | no-copy | dedicated-embed");
  grad_cmd->add_option("--report", grad.report, "Write the JSON report here");

  ImportArgs imp;
  auto* import_cmd = app.add_subcommand("import-spider", "Convert one database of a Spider tables file");
  import_cmd->add_option("--tables", imp.tables, "tables.json")->required()->check(CLI::ExistingFile);
  import_cmd->add_option("--db", imp.db, "Database id")->required();
  import_cmd->add_option("--out", imp.out, "Output schema file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*train_cmd) return run_train(train);
    if (*eval_cmd) return run_eval(eval);
    if (*parse_cmd) return run_parse(parse, false);
    if (*inspect_cmd) return run_parse(insp, true);
    if (*grad_cmd) return run_gradcheck_cmd(grad);
    if (*import_cmd) return run_import(imp);
  } catch (const linkgate::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
