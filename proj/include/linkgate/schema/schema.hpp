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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace linkgate {

enum class EntityKind { Table, Column };
enum class ColumnType { Number, Text, Time, Boolean, Other };
enum class EdgeLabel { TableColumn, ColumnTable, ForeignToPrimary, PrimaryToForeign };

std::string_view column_type_name(ColumnType t);
ColumnType parse_column_type(std::string_view name);
std::string_view edge_label_name(EdgeLabel label);

struct Entity {
  std::size_t index = 0;
  EntityKind kind = EntityKind::Table;
  std::string name;
  std::vector<std::string> name_tokens;
  ColumnType dtype = ColumnType::Other;  // columns only
  bool is_primary_key = false;           // columns only
  std::size_t table = 0;                 // owning table; a table owns itself

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;
  EdgeLabel label = EdgeLabel::TableColumn;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct ColumnSpec {
  std::string name;
  ColumnType dtype = ColumnType::Other;
  bool primary_key = false;
};

struct TableSpec {
  std::string name;
  std::vector<ColumnSpec> columns;
};

struct ForeignKeySpec {
  std::string from_table, from_column;
  std::string to_table, to_column;
};

// Database graph. Entity indices are canonical: tables in file order, then
// the columns of each table grouped by table in file order. Names are stored
// lowercased.
class Schema {
 public:
  Schema() = default;

  // Validates and builds the graph; throws LoadError on duplicate names,
  // dangling foreign keys, foreign keys that do not target a primary key, or
  // a table without columns.
  static Schema build(std::string db_id, std::vector<TableSpec> tables,
                      std::vector<ForeignKeySpec> foreign_keys);

  const std::string& db_id() const { return db_id_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const Entity& entity(std::size_t i) const { return entities_.at(i); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return entities_.size(); }
  std::size_t table_count() const { return tables_.size(); }
  std::size_t column_count() const { return entities_.size() - tables_.size(); }

  const std::vector<std::size_t>& tables() const { return tables_; }
  const std::vector<std::size_t>& columns_of(std::size_t table) const;
  // (foreign column, primary column) pairs in file order.
  const std::vector<std::pair<std::size_t, std::size_t>>& foreign_keys() const { return fks_; }

  std::optional<std::size_t> find_table(std::string_view name) const;
  std::optional<std::size_t> find_column(std::size_t table, std::string_view name) const;
  // "table.column" for columns, the table name for tables.
  std::string qualified_name(std::size_t entity) const;
  bool is_table(std::size_t entity) const { return entity_kind(entity) == EntityKind::Table; }
  EntityKind entity_kind(std::size_t entity) const { return entities_.at(entity).kind; }

  // Inverse of build(): the table and foreign-key lists the schema came from.
  std::vector<TableSpec> table_specs() const;
  std::vector<ForeignKeySpec> foreign_key_specs() const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::string db_id_;
  std::vector<Entity> entities_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> tables_;
  std::vector<std::vector<std::size_t>> columns_;
  std::vector<std::pair<std::size_t, std::size_t>> fks_;
};

// Native schema format:
// {"db_id": str, "tables": [{"name": str, "columns": [{"name": str,
//   "dtype": "number|text|time|boolean|other", "primary_key": bool}]}],
//  "foreign_keys": [{"from": "table.column", "to": "table.column"}]}
Schema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const Schema& schema);
Schema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const Schema& schema);

// Spider tables.json. The global "*" column is dropped; a foreign key whose
// target is not declared primary marks the target as a primary key.
Schema import_spider_tables(const std::filesystem::path& path, std::string_view db_id);
Schema spider_entry_to_schema(const nlohmann::json& entry);
nlohmann::json schema_to_spider_entry(const Schema& schema);

enum class Relation { Self, TableColumn, ColumnTable, ForeignToPrimary, PrimaryToForeign, Sibling };
std::string_view relation_name(Relation r);

struct StructuralLink {
  std::size_t entity = 0;
  Relation relation = Relation::Self;
  int steps = 0;

  friend bool operator==(const StructuralLink&, const StructuralLink&) = default;
};

// Self link, every one-step link, and column -> parent table -> sibling column.
std::vector<StructuralLink> structural_neighbors(const Schema& schema, std::size_t entity);

}  // namespace linkgate
