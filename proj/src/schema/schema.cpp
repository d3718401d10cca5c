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

#include "linkgate/schema/schema.hpp"

#include <fstream>
#include <set>
#include <utility>

#include "linkgate/error.hpp"
#include "linkgate/schema/text.hpp"

namespace linkgate {
namespace {

std::pair<std::string, std::string> split_qualified(const std::string& ref) {
  const auto dot = ref.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == ref.size()) {
    throw LoadError("foreign key reference '" + ref + "' is not of the form table.column");
  }
  return {ref.substr(0, dot), ref.substr(dot + 1)};
}

}  // namespace

std::string_view column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Number: return "number";
    case ColumnType::Text: return "text";
    case ColumnType::Time: return "time";
    case ColumnType::Boolean: return "boolean";
    case ColumnType::Other: return "other";
  }
  return "other";
}

ColumnType parse_column_type(std::string_view name) {
  const std::string n = to_lower(name);
  if (n == "number") return ColumnType::Number;
  if (n == "text") return ColumnType::Text;
  if (n == "time") return ColumnType::Time;
  if (n == "boolean") return ColumnType::Boolean;
  if (n == "other" || n == "others") return ColumnType::Other;
  throw LoadError("unknown column type '" + std::string(name) + "'");
}

std::string_view edge_label_name(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::TableColumn: return "TABLE_COLUMN";
    case EdgeLabel::ColumnTable: return "COLUMN_TABLE";
    case EdgeLabel::ForeignToPrimary: return "FOREIGN_TO_PRIMARY";
    case EdgeLabel::PrimaryToForeign: return "PRIMARY_TO_FOREIGN";
  }
  return "?";
}

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::Self: return "SELF";
    case Relation::TableColumn: return "TABLE_COLUMN";
    case Relation::ColumnTable: return "COLUMN_TABLE";
    case Relation::ForeignToPrimary: return "FOREIGN_TO_PRIMARY";
    case Relation::PrimaryToForeign: return "PRIMARY_TO_FOREIGN";
    case Relation::Sibling: return "SIBLING";
  }
  return "?";
}

Schema Schema::build(std::string db_id, std::vector<TableSpec> tables,
                     std::vector<ForeignKeySpec> foreign_keys) {
  if (tables.empty()) throw LoadError("schema '" + db_id + "' has no tables");
  Schema s;
  s.db_id_ = std::move(db_id);

  std::set<std::string> table_names;
  for (const TableSpec& t : tables) {
    const std::string name = to_lower(t.name);
    if (name.empty()) throw LoadError("schema '" + s.db_id_ + "': empty table name");
    if (!table_names.insert(name).second) {
      throw LoadError("schema '" + s.db_id_ + "': duplicate table '" + name + "'");
    }
    if (t.columns.empty()) {
      throw LoadError("schema '" + s.db_id_ + "': table '" + name + "' has no columns");
    }
    Entity e;
    e.index = s.entities_.size();
    e.kind = EntityKind::Table;
    e.name = name;
    e.name_tokens = split_name(name);
    e.table = e.index;
    if (e.name_tokens.empty()) throw LoadError("table name '" + name + "' has no tokens");
    s.tables_.push_back(e.index);
    s.entities_.push_back(std::move(e));
  }
  s.columns_.resize(tables.size());
  for (std::size_t t = 0; t < tables.size(); ++t) {
    std::set<std::string> column_names;
    for (const ColumnSpec& c : tables[t].columns) {
      const std::string name = to_lower(c.name);
      if (!column_names.insert(name).second) {
        throw LoadError("schema '" + s.db_id_ + "': duplicate column '" + name + "' in table '" +
                        s.entities_[t].name + "'");
      }
      Entity e;
      e.index = s.entities_.size();
      e.kind = EntityKind::Column;
      e.name = name;
      e.name_tokens = split_name(name);
      e.dtype = c.dtype;
      e.is_primary_key = c.primary_key;
      e.table = t;
      if (e.name_tokens.empty()) throw LoadError("column name '" + name + "' has no tokens");
      s.columns_[t].push_back(e.index);
      s.entities_.push_back(std::move(e));
    }
  }
  for (std::size_t t = 0; t < tables.size(); ++t) {
    for (std::size_t c : s.columns_[t]) {
      s.edges_.push_back({t, c, EdgeLabel::TableColumn});
      s.edges_.push_back({c, t, EdgeLabel::ColumnTable});
    }
  }
  auto resolve = [&](const std::string& table, const std::string& column) {
    const auto t = s.find_table(table);
    if (!t) throw LoadError("foreign key references missing table '" + table + "'");
    const auto c = s.find_column(*t, column);
    if (!c) throw LoadError("foreign key references missing column '" + table + "." + column + "'");
    return *c;
  };
  for (const ForeignKeySpec& fk : foreign_keys) {
    const std::size_t from = resolve(fk.from_table, fk.from_column);
    const std::size_t to = resolve(fk.to_table, fk.to_column);
    if (!s.entities_[to].is_primary_key) {
      throw LoadError("foreign key " + s.qualified_name(from) + " -> " + s.qualified_name(to) +
                      " does not reference a primary key");
    }
    if (from == to) throw LoadError("foreign key " + s.qualified_name(from) + " references itself");
    s.fks_.emplace_back(from, to);
    s.edges_.push_back({from, to, EdgeLabel::ForeignToPrimary});
    s.edges_.push_back({to, from, EdgeLabel::PrimaryToForeign});
  }
  return s;
}

const std::vector<std::size_t>& Schema::columns_of(std::size_t table) const {
  return columns_.at(table);
}

std::optional<std::size_t> Schema::find_table(std::string_view name) const {
  const std::string n = to_lower(name);
  for (std::size_t t : tables_) {
    if (entities_[t].name == n) return t;
  }
  return std::nullopt;
}

std::optional<std::size_t> Schema::find_column(std::size_t table, std::string_view name) const {
  const std::string n = to_lower(name);
  for (std::size_t c : columns_.at(table)) {
    if (entities_[c].name == n) return c;
  }
  return std::nullopt;
}

std::string Schema::qualified_name(std::size_t entity) const {
  const Entity& e = entities_.at(entity);
  if (e.kind == EntityKind::Table) return e.name;
  return entities_[e.table].name + "." + e.name;
}

std::vector<TableSpec> Schema::table_specs() const {
  std::vector<TableSpec> out;
  for (std::size_t t : tables_) {
    TableSpec spec{entities_[t].name, {}};
    for (std::size_t c : columns_[t]) {
      const Entity& e = entities_[c];
      spec.columns.push_back({e.name, e.dtype, e.is_primary_key});
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<ForeignKeySpec> Schema::foreign_key_specs() const {
  std::vector<ForeignKeySpec> out;
  for (const auto& [from, to] : fks_) {
    out.push_back({entities_[entities_[from].table].name, entities_[from].name,
                   entities_[entities_[to].table].name, entities_[to].name});
  }
  return out;
}

Schema schema_from_json(const nlohmann::json& j) {
  try {
    std::vector<TableSpec> tables;
    for (const auto& t : j.at("tables")) {
      TableSpec spec;
      spec.name = t.at("name").get<std::string>();
      for (const auto& c : t.at("columns")) {
        spec.columns.push_back({c.at("name").get<std::string>(),
                                parse_column_type(c.value("dtype", std::string("other"))),
                                c.value("primary_key", false)});
      }
      tables.push_back(std::move(spec));
    }
    std::vector<ForeignKeySpec> fks;
    for (const auto& fk : j.value("foreign_keys", nlohmann::json::array())) {
      auto [ft, fc] = split_qualified(fk.at("from").get<std::string>());
      auto [tt, tc] = split_qualified(fk.at("to").get<std::string>());
      fks.push_back({ft, fc, tt, tc});
    }
    return Schema::build(j.at("db_id").get<std::string>(), std::move(tables), std::move(fks));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed schema: ") + e.what());
  }
}

nlohmann::json schema_to_json(const Schema& schema) {
  nlohmann::json tables = nlohmann::json::array();
  for (const TableSpec& t : schema.table_specs()) {
    nlohmann::json cols = nlohmann::json::array();
    for (const ColumnSpec& c : t.columns) {
      cols.push_back({{"name", c.name},
                      {"dtype", std::string(column_type_name(c.dtype))},
                      {"primary_key", c.primary_key}});
    }
    tables.push_back({{"name", t.name}, {"columns", cols}});
  }
  nlohmann::json fks = nlohmann::json::array();
  for (const ForeignKeySpec& fk : schema.foreign_key_specs()) {
    fks.push_back({{"from", fk.from_table + "." + fk.from_column},
                   {"to", fk.to_table + "." + fk.to_column}});
  }
  return {{"db_id", schema.db_id()}, {"tables", tables}, {"foreign_keys", fks}};
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open schema file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("schema file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return schema_from_json(j);
}

void save_schema(const std::filesystem::path& path, const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write schema file '" + path.string() + "'");
  out << schema_to_json(schema).dump(2) << "\n";
}

Schema spider_entry_to_schema(const nlohmann::json& entry) {
  try {
    const auto table_names = entry.at("table_names_original").get<std::vector<std::string>>();
    const auto& columns = entry.at("column_names_original");
    const auto& types = entry.at("column_types");
    std::set<std::size_t> primary;
    for (const auto& pk : entry.value("primary_keys", nlohmann::json::array())) {
      if (pk.is_array()) {
        for (const auto& p : pk) primary.insert(p.get<std::size_t>());
      } else {
        primary.insert(pk.get<std::size_t>());
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> fk_pairs;
    for (const auto& fk : entry.value("foreign_keys", nlohmann::json::array())) {
      fk_pairs.emplace_back(fk.at(0).get<std::size_t>(), fk.at(1).get<std::size_t>());
      primary.insert(fk.at(1).get<std::size_t>());
    }
    std::vector<TableSpec> tables;
    for (const auto& name : table_names) tables.push_back({name, {}});
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const int table = columns[i].at(0).get<int>();
      if (table < 0) continue;  // the global "*" entry
      if (static_cast<std::size_t>(table) >= tables.size()) {
        throw LoadError("spider column " + std::to_string(i) + " references missing table");
      }
      tables[static_cast<std::size_t>(table)].columns.push_back(
          {columns[i].at(1).get<std::string>(), parse_column_type(types.at(i).get<std::string>()),
           primary.count(i) != 0});
    }
    auto describe = [&](std::size_t col) -> std::pair<std::string, std::string> {
      const int table = columns.at(col).at(0).get<int>();
      if (table < 0) throw LoadError("spider foreign key references '*'");
      return {table_names.at(static_cast<std::size_t>(table)), columns.at(col).at(1).get<std::string>()};
    };
    std::vector<ForeignKeySpec> fks;
    for (const auto& [from, to] : fk_pairs) {
      auto [ft, fc] = describe(from);
      auto [tt, tc] = describe(to);
      fks.push_back({ft, fc, tt, tc});
    }
    return Schema::build(entry.at("db_id").get<std::string>(), std::move(tables), std::move(fks));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed spider tables entry: ") + e.what());
  }
}

nlohmann::json schema_to_spider_entry(const Schema& schema) {
  nlohmann::json table_names = nlohmann::json::array();
  nlohmann::json columns = nlohmann::json::array({nlohmann::json::array({-1, "*"})});
  nlohmann::json types = nlohmann::json::array({"text"});
  nlohmann::json primary = nlohmann::json::array();
  std::vector<std::size_t> spider_index(schema.size(), 0);
  for (std::size_t t : schema.tables()) {
    table_names.push_back(schema.entity(t).name);
    for (std::size_t c : schema.columns_of(t)) {
      const Entity& e = schema.entity(c);
      spider_index[c] = columns.size();
      if (e.is_primary_key) primary.push_back(columns.size());
      columns.push_back(nlohmann::json::array({t, e.name}));
      types.push_back(std::string(column_type_name(e.dtype)));
    }
  }
  nlohmann::json fks = nlohmann::json::array();
  for (const auto& [from, to] : schema.foreign_keys()) {
    fks.push_back(nlohmann::json::array({spider_index[from], spider_index[to]}));
  }
  return {{"db_id", schema.db_id()},
          {"table_names_original", table_names},
          {"table_names", table_names},
          {"column_names_original", columns},
          {"column_names", columns},
          {"column_types", types},
          {"primary_keys", primary},
          {"foreign_keys", fks}};
}

Schema import_spider_tables(const std::filesystem::path& path, std::string_view db_id) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open tables file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("tables file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.is_array()) throw LoadError("tables file must hold a JSON array");
  for (const auto& entry : j) {
    if (entry.value("db_id", std::string()) == db_id) return spider_entry_to_schema(entry);
  }
  throw LookupError("database '" + std::string(db_id) + "' not found in '" + path.string() + "'");
}

std::vector<StructuralLink> structural_neighbors(const Schema& schema, std::size_t entity) {
  if (entity >= schema.size()) {
    throw UsageError("structural_neighbors: entity " + std::to_string(entity) + " out of range");
  }
  std::vector<StructuralLink> out{{entity, Relation::Self, 0}};
  for (const Edge& e : schema.edges()) {
    if (e.source != entity) continue;
    Relation r = Relation::TableColumn;
    switch (e.label) {
      case EdgeLabel::TableColumn: r = Relation::TableColumn; break;
      case EdgeLabel::ColumnTable: r = Relation::ColumnTable; break;
      case EdgeLabel::ForeignToPrimary: r = Relation::ForeignToPrimary; break;
      case EdgeLabel::PrimaryToForeign: r = Relation::PrimaryToForeign; break;
    }
    out.push_back({e.target, r, 1});
  }
  const Entity& self = schema.entity(entity);
  if (self.kind == EntityKind::Column) {
    for (std::size_t sibling : schema.columns_of(self.table)) {
      if (sibling != entity) out.push_back({sibling, Relation::Sibling, 2});
    }
  }
  return out;
}

}  // namespace linkgate
