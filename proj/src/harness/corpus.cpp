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

#include "linkgate/harness/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>

#include "linkgate/error.hpp"
#include "linkgate/schema/text.hpp"
#include "linkgate/sql/sql_text.hpp"
#include "linkgate/tensor/random.hpp"

namespace linkgate::harness {
namespace {

using sql::Agg;
using sql::AggExpr;
using sql::Cmp;
using sql::Query;
using sql::Statement;

const std::vector<std::string> kTablePool = {
    "singer",  "stadium",  "concert", "album",    "artist",  "song",     "course",  "student", "teacher",
    "faculty", "employee", "company", "product",  "customer", "store",   "airport", "flight",  "airline",
    "book",    "author",   "library", "movie",    "director", "team",    "player",  "game",    "hospital",
    "doctor",  "patient",  "ship",    "captain",  "club",     "member",  "event",   "museum",  "visitor",
    "restaurant", "chef",  "dish",    "school",   "driver",   "car",     "race",    "farm",    "animal",
    "hotel",   "guest",    "journal", "editor",   "festival", "band",    "shop",    "supplier", "warehouse",
    "project", "manager",  "gallery", "volunteer", "tournament", "church"};

struct Attribute {
  const char* name;
  ColumnType dtype;
};

const std::vector<Attribute> kAttributePool = {
    {"name", ColumnType::Text},          {"title", ColumnType::Text},        {"age", ColumnType::Number},
    {"year", ColumnType::Number},        {"price", ColumnType::Number},      {"capacity", ColumnType::Number},
    {"rating", ColumnType::Number},      {"country", ColumnType::Text},      {"budget", ColumnType::Number},
    {"salary", ColumnType::Number},      {"color", ColumnType::Text},        {"gender", ColumnType::Text},
    {"founded", ColumnType::Number},     {"height", ColumnType::Number},     {"weight", ColumnType::Number},
    {"population", ColumnType::Number},  {"score", ColumnType::Number},      {"category", ColumnType::Text},
    {"status", ColumnType::Text},        {"email", ColumnType::Text},        {"phone", ColumnType::Text},
    {"address", ColumnType::Text},       {"opening_date", ColumnType::Time}, {"birth_date", ColumnType::Time},
    {"duration", ColumnType::Number},    {"language", ColumnType::Text},     {"genre", ColumnType::Text},
    {"nationality", ColumnType::Text},   {"location", ColumnType::Text},     {"region", ColumnType::Text},
    {"level", ColumnType::Number},       {"ranking", ColumnType::Number},    {"length", ColumnType::Number},
    {"speed", ColumnType::Number},       {"cost", ColumnType::Number},       {"revenue", ColumnType::Number},
    {"quantity", ColumnType::Number},    {"description", ColumnType::Text},  {"owner", ColumnType::Text},
    {"brand", ColumnType::Text},         {"model_name", ColumnType::Text},   {"grade", ColumnType::Number},
    {"credits", ColumnType::Number},     {"points", ColumnType::Number},     {"votes", ColumnType::Number},
    {"release_date", ColumnType::Time},  {"area", ColumnType::Number},       {"city", ColumnType::Text},
    {"website", ColumnType::Text},       {"start_time", ColumnType::Time}};

const std::vector<std::string> kTemplates = {"select",           "select_where",      "agg_where",
                                             "join_group_count", "join_group_having", "join_order_count",
                                             "set_operation",    "order_by",          "join_where",
                                             "not_in"};

// A generated table with the names the templates need.
struct TableInfo {
  int entity = -1;
  int pk = -1;
  std::vector<int> attrs;
};

struct SchemaInfo {
  Schema schema;
  std::vector<TableInfo> tables;
  // (child table, parent table, child fk column) per foreign key.
  struct Link {
    std::size_t child, parent;
    int fk;
  };
  std::vector<Link> links;
};

std::string words(const Schema& s, int entity) {
  std::string out;
  for (const std::string& t : s.entity(static_cast<std::size_t>(entity)).name_tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

SchemaInfo random_schema(Rng& rng, const std::string& db_id) {
  std::vector<std::string> names = kTablePool;
  rng.shuffle(names);
  std::vector<std::size_t> attr_order(kAttributePool.size());
  for (std::size_t i = 0; i < attr_order.size(); ++i) attr_order[i] = i;
  rng.shuffle(attr_order);
  std::size_t next_attr = 0;

  const std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 5));
  std::vector<TableSpec> specs(n);
  std::vector<ForeignKeySpec> fks;
  for (std::size_t k = 0; k < n; ++k) {
    TableSpec& t = specs[k];
    t.name = names[k];
    std::vector<ColumnSpec> rest;
    if (k > 0) {
      const std::string& parent = specs[rng.index(k)].name;
      rest.push_back({parent + "_id", ColumnType::Number, false});
      fks.push_back({t.name, parent + "_id", parent, parent + "_id"});
    }
    const auto attrs = rng.uniform_int(2, k > 0 ? 4 : 5);
    for (std::int64_t a = 0; a < attrs; ++a) {
      const Attribute& attr = kAttributePool[attr_order[next_attr++]];
      rest.push_back({attr.name, attr.dtype, false});
    }
    rng.shuffle(rest);
    t.columns.push_back({t.name + "_id", ColumnType::Number, true});
    t.columns.insert(t.columns.end(), rest.begin(), rest.end());
  }
  rng.shuffle(specs);

  SchemaInfo info;
  info.schema = Schema::build(db_id, specs, fks);
  const Schema& s = info.schema;
  for (std::size_t t : s.tables()) {
    TableInfo ti;
    ti.entity = static_cast<int>(t);
    for (std::size_t c : s.columns_of(t)) {
      const Entity& e = s.entity(c);
      if (e.is_primary_key) {
        ti.pk = static_cast<int>(c);
      } else if (e.name.size() < 3 || e.name.compare(e.name.size() - 3, 3, "_id") != 0) {
        ti.attrs.push_back(static_cast<int>(c));
      }
    }
    info.tables.push_back(std::move(ti));
  }
  for (const auto& [fk, pk] : s.foreign_keys()) {
    const std::size_t child = s.entity(fk).table, parent = s.entity(pk).table;
    auto position = [&](std::size_t table) {
      return static_cast<std::size_t>(std::find(s.tables().begin(), s.tables().end(), table) - s.tables().begin());
    };
    info.links.push_back({position(child), position(parent), static_cast<int>(fk)});
  }
  return info;
}

std::vector<Cmp> comparisons_for(ColumnType t) {
  switch (t) {
    case ColumnType::Number:
      return {Cmp::Eq, Cmp::Ne, Cmp::Gt, Cmp::Lt, Cmp::Ge, Cmp::Le};
    case ColumnType::Time:
      return {Cmp::Eq, Cmp::Gt, Cmp::Lt};
    default:
      return {Cmp::Eq, Cmp::Ne, Cmp::Like};
  }
}

std::string cmp_words(Cmp c, ColumnType t) {
  const bool time = t == ColumnType::Time;
  switch (c) {
    case Cmp::Eq:
      return "is";
    case Cmp::Ne:
      return "is not";
    case Cmp::Gt:
      return time ? "is after" : "is greater than";
    case Cmp::Lt:
      return time ? "is before" : "is less than";
    case Cmp::Ge:
      return "is at least";
    case Cmp::Le:
      return "is at most";
    case Cmp::Like:
      return "contains";
  }
  return "is";
}

std::string agg_words(Agg a) {
  switch (a) {
    case Agg::Avg:
      return "average";
    case Agg::Sum:
      return "total";
    case Agg::Min:
      return "minimum";
    case Agg::Max:
      return "maximum";
    default:
      return "number of";
  }
}

struct Generated {
  Statement stmt;
  std::string question;
};

class TemplateGenerator {
 public:
  TemplateGenerator(const SchemaInfo& info, Rng& rng) : info_(info), s_(info.schema), rng_(rng) {}

  std::optional<Generated> generate(const std::string& name) {
    if (name == "select") return simple_select();
    if (name == "select_where") return select_where();
    if (name == "agg_where") return agg_where();
    if (name == "join_group_count") return join_group(0);
    if (name == "join_group_having") return join_group(1);
    if (name == "join_order_count") return join_group(2);
    if (name == "set_operation") return set_operation();
    if (name == "order_by") return order_by();
    if (name == "join_where") return join_where();
    if (name == "not_in") return not_in();
    throw UsageError("unknown template '" + name + "'");
  }

 private:
  const TableInfo& any_table() { return info_.tables[rng_.index(info_.tables.size())]; }
  std::string w(int entity) const { return words(s_, entity); }
  ColumnType dtype(int c) const { return s_.entity(static_cast<std::size_t>(c)).dtype; }
  int pick(const std::vector<int>& from) { return from[rng_.index(from.size())]; }
  std::vector<int> without(std::vector<int> v, int x) {
    v.erase(std::remove(v.begin(), v.end(), x), v.end());
    return v;
  }

  sql::Cond compare(int column, std::string& phrase) {
    const auto cmps = comparisons_for(dtype(column));
    const Cmp c = cmps[rng_.index(cmps.size())];
    phrase = w(column) + " " + cmp_words(c, dtype(column)) + " a given value";
    return {column, sql::CondKind::Compare, c, nullptr};
  }

  Generated simple_select() {
    const TableInfo& t = any_table();
    Query q;
    q.from = t.entity;
    const int a = pick(t.attrs);
    q.select.push_back({Agg::None, a});
    std::string cols = w(a);
    if (t.attrs.size() > 1 && rng_.bernoulli(0.4)) {
      const int b = pick(without(t.attrs, a));
      q.select.push_back({Agg::None, b});
      cols += " and " + w(b);
    }
    const std::string question = rng_.bernoulli(0.5) ? "show the " + cols + " of all " + w(t.entity)
                                                     : "list every " + w(t.entity) + " " + cols;
    return {{q, sql::SetOp::None, std::nullopt}, question};
  }

  Generated select_where() {
    const TableInfo& t = any_table();
    Query q;
    q.from = t.entity;
    const int a = pick(t.attrs);
    q.select.push_back({Agg::None, a});
    std::string phrase;
    q.where.push_back(compare(pick(without(t.attrs, a)), phrase));
    std::string question = "what is the " + w(a) + " of " + w(t.entity) + " whose " + phrase;
    const auto rest = without(without(t.attrs, a), q.where[0].column);
    if (!rest.empty() && rng_.bernoulli(0.3)) {
      const bool conj = rng_.bernoulli(0.5);
      q.where.push_back(compare(pick(rest), phrase));
      q.connectors.push_back(conj ? sql::Connector::And : sql::Connector::Or);
      question += (conj ? " and " : " or ") + phrase;
    }
    return {{q, sql::SetOp::None, std::nullopt}, question};
  }

  Generated agg_where() {
    const TableInfo& t = any_table();
    Query q;
    q.from = t.entity;
    std::vector<int> numbers;
    for (int c : t.attrs) {
      if (dtype(c) == ColumnType::Number) numbers.push_back(c);
    }
    std::string phrase;
    if (!numbers.empty() && rng_.bernoulli(0.5)) {
      const int a = pick(numbers);
      static const std::vector<Agg> aggs = {Agg::Avg, Agg::Sum, Agg::Min, Agg::Max};
      const Agg agg = aggs[rng_.index(aggs.size())];
      q.select.push_back({agg, a});
      q.where.push_back(compare(pick(without(t.attrs, a)), phrase));
      return {{q, sql::SetOp::None, std::nullopt},
              "what is the " + agg_words(agg) + " " + w(a) + " of " + w(t.entity) + " whose " + phrase};
    }
    q.select.push_back({Agg::CountStar, -1});
    q.where.push_back(compare(pick(t.attrs), phrase));
    return {{q, sql::SetOp::None, std::nullopt}, "how many " + w(t.entity) + " have " + phrase};
  }

  // 0: count per parent; 1: having count; 2: order by count with limit.
  Generated join_group(int variant) {
    const SchemaInfo::Link& link = info_.links[rng_.index(info_.links.size())];
    const TableInfo& p = info_.tables[link.parent];
    const TableInfo& c = info_.tables[link.child];
    Query q;
    const int a = pick(p.attrs);
    q.select.push_back({Agg::None, a});
    q.from = p.entity;
    q.joins.push_back({c.entity, p.pk, link.fk});
    q.group_by = sql::GroupBy{p.pk, std::nullopt};
    std::string question;
    if (variant == 0) {
      q.select.push_back({Agg::CountStar, -1});
      question = rng_.bernoulli(0.5) ? "for each " + w(p.entity) + " show the " + w(a) + " and the number of " + w(c.entity)
                                     : "how many " + w(c.entity) + " does each " + w(p.entity) + " have and what is its " + w(a);
    } else if (variant == 1) {
      static const std::vector<std::pair<Cmp, const char*>> ops = {
          {Cmp::Gt, "more than"}, {Cmp::Lt, "fewer than"}, {Cmp::Ge, "at least"}};
      const auto& [cmp, text] = ops[rng_.index(ops.size())];
      q.group_by->having = sql::Having{{Agg::CountStar, -1}, cmp};
      question = "which " + w(p.entity) + " " + w(a) + " have " + text + " a given number of " + w(c.entity);
    } else {
      const bool most = rng_.bernoulli(0.7);
      q.order_by = sql::OrderBy{{Agg::CountStar, -1}, most};
      q.limit = true;
      question = "what is the " + w(a) + " of the " + w(p.entity) + " with the " + (most ? "most " : "fewest ") + w(c.entity);
    }
    return {{q, sql::SetOp::None, std::nullopt}, question};
  }

  Generated set_operation() {
    const TableInfo& t = any_table();
    const int a = pick(t.attrs);
    const auto others = without(t.attrs, a);
    std::string left_phrase, right_phrase;
    Query l, r;
    l.from = r.from = t.entity;
    l.select.push_back({Agg::None, a});
    r.select = l.select;
    l.where.push_back(compare(pick(others), left_phrase));
    r.where.push_back(compare(pick(others), right_phrase));
    static const std::vector<std::pair<sql::SetOp, const char*>> ops = {
        {sql::SetOp::Intersect, " and also "}, {sql::SetOp::Union, " or "}, {sql::SetOp::Except, " but not "}};
    const auto& [op, text] = ops[rng_.index(ops.size())];
    return {{l, op, r}, "find the " + w(a) + " of " + w(t.entity) + " whose " + left_phrase + text + right_phrase};
  }

  Generated order_by() {
    const TableInfo& t = any_table();
    Query q;
    q.from = t.entity;
    const int a = pick(t.attrs);
    const int b = pick(without(t.attrs, a));
    q.select.push_back({Agg::None, a});
    const bool desc = rng_.bernoulli(0.5);
    q.order_by = sql::OrderBy{{Agg::None, b}, desc};
    std::string question;
    if (rng_.bernoulli(0.4)) {
      q.limit = true;
      question = "what is the " + w(a) + " of the " + w(t.entity) + " with the " + (desc ? "highest " : "lowest ") + w(b);
    } else {
      question = "list the " + w(a) + " of " + w(t.entity) + " sorted by " + w(b) + (desc ? " descending" : " ascending");
    }
    return {{q, sql::SetOp::None, std::nullopt}, question};
  }

  Generated join_where() {
    const SchemaInfo::Link& link = info_.links[rng_.index(info_.links.size())];
    const TableInfo& p = info_.tables[link.parent];
    const TableInfo& c = info_.tables[link.child];
    const bool from_parent = rng_.bernoulli(0.5);
    const TableInfo& x = from_parent ? p : c;
    const TableInfo& y = from_parent ? c : p;
    Query q;
    const int a = pick(x.attrs);
    q.select.push_back({Agg::None, a});
    q.from = x.entity;
    q.joins.push_back(from_parent ? sql::Join{c.entity, p.pk, link.fk} : sql::Join{p.entity, link.fk, p.pk});
    std::string phrase;
    q.where.push_back(compare(pick(y.attrs), phrase));
    return {{q, sql::SetOp::None, std::nullopt},
            "what is the " + w(a) + " of " + w(x.entity) + " whose " + w(y.entity) + " " + phrase};
  }

  Generated not_in() {
    const SchemaInfo::Link& link = info_.links[rng_.index(info_.links.size())];
    const TableInfo& p = info_.tables[link.parent];
    const TableInfo& c = info_.tables[link.child];
    auto sub = std::make_shared<Query>();
    sub->select.push_back({Agg::None, link.fk});
    sub->from = c.entity;
    Query q;
    const int a = pick(p.attrs);
    q.select.push_back({Agg::None, a});
    q.from = p.entity;
    q.where.push_back({p.pk, sql::CondKind::NotIn, Cmp::Eq, sub});
    const std::string question = rng_.bernoulli(0.5) ? "which " + w(p.entity) + " " + w(a) + " have no " + w(c.entity)
                                                     : "list the " + w(a) + " of " + w(p.entity) + " without any " + w(c.entity);
    return {{q, sql::SetOp::None, std::nullopt}, question};
  }

  const SchemaInfo& info_;
  const Schema& s_;
  Rng& rng_;
};

void check_generated(const Generated& g, const Schema& schema, const std::string& sql_text) {
  if (sql::parse_statement(sql_text, schema) != g.stmt) {
    throw std::logic_error("generated SQL does not round-trip: " + sql_text);
  }
  for (const std::string& t : tokenize_question(g.question)) {
    if (t == "id") throw std::logic_error("generated question mentions a key column: " + g.question);
  }
}

std::vector<DatasetExample> generate_split(const std::vector<const SchemaInfo*>& dbs, std::size_t count,
                                           const std::string& prefix, Rng& rng) {
  std::vector<DatasetExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const SchemaInfo& info = *dbs[rng.index(dbs.size())];
    const std::string& name = kTemplates[rng.index(kTemplates.size())];
    TemplateGenerator gen(info, rng);
    const Generated g = *gen.generate(name);
    DatasetExample ex;
    ex.id = prefix + "-" + std::to_string(i);
    ex.db_id = info.schema.db_id();
    ex.template_name = name;
    ex.question = g.question;
    ex.sql = sql::render_statement(g.stmt, info.schema);
    check_generated(g, info.schema, ex.sql);
    out.push_back(std::move(ex));
  }
  return out;
}

nlohmann::json example_to_json(const DatasetExample& e) {
  nlohmann::json j = {{"id", e.id}, {"db_id", e.db_id}, {"question", e.question}, {"sql", e.sql}};
  if (!e.template_name.empty()) j["template"] = e.template_name;
  return j;
}

}  // namespace

const std::vector<std::string>& template_names() { return kTemplates; }

bool is_join_group_template(const std::string& name) {
  return name == "join_group_count" || name == "join_group_having" || name == "join_order_count";
}

std::size_t dev_schema_count(std::size_t schemas) { return std::max<std::size_t>(1, schemas / 5); }

Corpus generate_corpus(const CorpusOptions& options) {
  if (options.schemas < 2) throw UsageError("generate_corpus: need at least two schemas (train and dev)");
  Rng rng(options.seed);
  const std::size_t n_dev = dev_schema_count(options.schemas);
  std::vector<SchemaInfo> infos;
  infos.reserve(options.schemas);
  for (std::size_t i = 0; i < options.schemas; ++i) {
    const bool dev = i >= options.schemas - n_dev;
    const std::size_t k = dev ? i - (options.schemas - n_dev) : i;
    infos.push_back(random_schema(rng, (dev ? "dev_db_" : "train_db_") + std::to_string(k)));
  }
  std::vector<const SchemaInfo*> train_dbs, dev_dbs;
  for (std::size_t i = 0; i < infos.size(); ++i) (i < options.schemas - n_dev ? train_dbs : dev_dbs).push_back(&infos[i]);

  Corpus corpus;
  corpus.train = generate_split(train_dbs, options.train_examples, "train", rng);
  corpus.dev = generate_split(dev_dbs, options.dev_examples, "dev", rng);
  for (SchemaInfo& info : infos) {
    std::string id = info.schema.db_id();
    corpus.schemas.emplace(std::move(id), std::move(info.schema));
  }
  return corpus;
}

void write_dataset(const std::filesystem::path& path, const std::vector<DatasetExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  for (const DatasetExample& e : examples) out << example_to_json(e).dump() << '\n';
}

std::vector<DatasetExample> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  std::vector<DatasetExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      DatasetExample e;
      e.id = j.at("id").get<std::string>();
      e.db_id = j.at("db_id").get<std::string>();
      e.question = j.at("question").get<std::string>();
      e.sql = j.at("sql").get<std::string>();
      e.template_name = j.value("template", "");
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& err) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + err.what());
    }
  }
  return out;
}

std::map<std::string, Schema> read_schemas(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw LoadError("schema directory not found: " + dir.string());
  std::map<std::string, Schema> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    Schema s = load_schema(entry.path());
    std::string id = s.db_id();
    out.emplace(std::move(id), std::move(s));
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  std::filesystem::create_directories(dir / "schemas");
  for (const auto& [id, schema] : corpus.schemas) save_schema(dir / "schemas" / (id + ".json"), schema);
  write_dataset(dir / "train.jsonl", corpus.train);
  write_dataset(dir / "dev.jsonl", corpus.dev);
}

Corpus read_corpus(const std::filesystem::path& dir) {
  Corpus c;
  c.schemas = read_schemas(dir / "schemas");
  c.train = read_dataset(dir / "train.jsonl");
  if (std::filesystem::exists(dir / "dev.jsonl")) c.dev = read_dataset(dir / "dev.jsonl");
  return c;
}

std::vector<Example> to_model_examples(const std::vector<DatasetExample>& data,
                                       const std::map<std::string, Schema>& schemas) {
  std::vector<Example> out;
  out.reserve(data.size());
  for (const DatasetExample& d : data) {
    const auto it = schemas.find(d.db_id);
    if (it == schemas.end()) throw LookupError("example " + d.id + ": unknown database '" + d.db_id + "'");
    out.push_back({d.id, &it->second, tokenize_question(d.question), sql::linearize(sql::parse_sql(d.sql, it->second))});
  }
  return out;
}

}  // namespace linkgate::harness
