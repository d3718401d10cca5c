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

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "linkgate/sql/ast.hpp"

namespace linkgate::sql {

// Typed view of an SqlAst. Entity fields hold schema entity indices.

enum class Agg { None, CountStar, Count, Sum, Avg, Min, Max };
enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge, Like };
enum class CondKind { Compare, In, NotIn };
enum class Connector { And, Or };
enum class SetOp { None, Intersect, Union, Except };

std::string_view agg_name(Agg a);    // "" for None, "count" for CountStar
std::string_view cmp_text(Cmp c);    // "=", "!=", ..., "like"
std::string_view set_op_name(SetOp op);

struct AggExpr {
  Agg agg = Agg::None;
  int column = -1;  // -1 for count(*)

  friend bool operator==(const AggExpr&, const AggExpr&) = default;
};

struct Query;

struct Cond {
  int column = -1;
  CondKind kind = CondKind::Compare;
  Cmp cmp = Cmp::Eq;                // Compare only
  std::shared_ptr<const Query> sub;  // In / NotIn only

  friend bool operator==(const Cond& a, const Cond& b);
};

struct Join {
  int table = -1;
  int left = -1;
  int right = -1;

  friend bool operator==(const Join&, const Join&) = default;
};

struct Having {
  AggExpr expr;
  Cmp cmp = Cmp::Eq;

  friend bool operator==(const Having&, const Having&) = default;
};

struct GroupBy {
  int column = -1;
  std::optional<Having> having;

  friend bool operator==(const GroupBy&, const GroupBy&) = default;
};

struct OrderBy {
  AggExpr expr;
  bool descending = false;

  friend bool operator==(const OrderBy&, const OrderBy&) = default;
};

struct Query {
  std::vector<AggExpr> select;
  int from = -1;
  std::vector<Join> joins;
  std::vector<Cond> where;            // empty means no WHERE clause
  std::vector<Connector> connectors;  // where.size() - 1 entries
  std::optional<GroupBy> group_by;
  std::optional<OrderBy> order_by;
  bool limit = false;

  // Tables in FROM order: the first table, then each joined table.
  std::vector<int> tables() const;

  friend bool operator==(const Query&, const Query&) = default;
};

struct Statement {
  Query left;
  SetOp op = SetOp::None;
  std::optional<Query> right;

  friend bool operator==(const Statement&, const Statement&) = default;
};

// Throws UsageError on malformed trees or inconsistent statements.
Statement statement_from_ast(const SqlAst& ast);
SqlAst to_ast(const Statement& stmt);
Query query_from_ast(const SqlAst& node);
SqlAst query_to_ast(const Query& q);

// Every query in the statement: the left operand, nested subqueries
// (depth-first), then the right operand and its subqueries.
std::vector<const Query*> all_queries(const Statement& stmt);

}  // namespace linkgate::sql
