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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "linkgate/model/model.hpp"
#include "linkgate/schema/schema.hpp"

namespace linkgate::harness {

// One question/SQL pair as stored in train.jsonl / dev.jsonl.
struct DatasetExample {
  std::string id;
  std::string db_id;
  std::string template_name;  // empty for hand-written data
  std::string question;
  std::string sql;

  friend bool operator==(const DatasetExample&, const DatasetExample&) = default;
};

struct CorpusOptions {
  std::uint64_t seed = 7;
  std::size_t schemas = 10;  // split between train and dev databases
  std::size_t train_examples = 200;
  std::size_t dev_examples = 50;
};

struct Corpus {
  std::map<std::string, Schema> schemas;
  std::vector<DatasetExample> train;
  std::vector<DatasetExample> dev;
};

// Template names, in generation order.
const std::vector<std::string>& template_names();
// Templates whose gold query joins tables and groups by the joined key.
bool is_join_group_template(const std::string& name);

// Random schemas (2-5 tables, foreign keys forming a tree) and template
// question/SQL pairs. Train and dev use disjoint databases. Throws UsageError
// when fewer than two schemas are requested.
Corpus generate_corpus(const CorpusOptions& options);

// Number of dev databases for a total of `schemas`.
std::size_t dev_schema_count(std::size_t schemas);

// DIR/schemas/<db_id>.json, DIR/train.jsonl, DIR/dev.jsonl.
void write_corpus(const std::filesystem::path& dir, const Corpus& corpus);
Corpus read_corpus(const std::filesystem::path& dir);

std::map<std::string, Schema> read_schemas(const std::filesystem::path& dir);
std::vector<DatasetExample> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const std::vector<DatasetExample>& examples);

// Parses and linearizes every example against its database. Throws
// LookupError for unknown databases and ParseError for unsupported SQL.
// The returned examples point into `schemas`.
std::vector<Example> to_model_examples(const std::vector<DatasetExample>& data,
                                       const std::map<std::string, Schema>& schemas);

}  // namespace linkgate::harness
