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

#include "linkgate/sql/query.hpp"

#include <string>

#include "linkgate/error.hpp"

namespace linkgate::sql {
namespace {

AggExpr agg_from_ast(const SqlAst& node) {
  switch (node.rule) {
    case rules::kAggColumn: return {Agg::None, node.children.at(0).entity};
    case rules::kAggCountStar: return {Agg::CountStar, -1};
    case rules::kAggCount: return {Agg::Count, node.children.at(0).entity};
    case rules::kAggSum: return {Agg::Sum, node.children.at(0).entity};
    case rules::kAggAvg: return {Agg::Avg, node.children.at(0).entity};
    case rules::kAggMin: return {Agg::Min, node.children.at(0).entity};
    case rules::kAggMax: return {Agg::Max, node.children.at(0).entity};
    default: throw UsageError("expected an aggregate expression, found rule " + std::to_string(node.rule));
  }
}

SqlAst agg_to_ast(const AggExpr& e) {
  switch (e.agg) {
    case Agg::None: return {rules::kAggColumn, -1, {SqlAst::slot(e.column)}};
    case Agg::CountStar: return {rules::kAggCountStar, -1, {}};
    case Agg::Count: return {rules::kAggCount, -1, {SqlAst::slot(e.column)}};
    case Agg::Sum: return {rules::kAggSum, -1, {SqlAst::slot(e.column)}};
    case Agg::Avg: return {rules::kAggAvg, -1, {SqlAst::slot(e.column)}};
    case Agg::Min: return {rules::kAggMin, -1, {SqlAst::slot(e.column)}};
    case Agg::Max: return {rules::kAggMax, -1, {SqlAst::slot(e.column)}};
  }
  throw UsageError("bad aggregate");
}

Cmp cmp_from_ast(const SqlAst& node) {
  const int k = node.rule - rules::kCmpFirst;
  if (k < 0 || k > 6) throw UsageError("expected a comparison, found rule " + std::to_string(node.rule));
  return static_cast<Cmp>(k);
}

SqlAst cmp_to_ast(Cmp c) { return {rules::kCmpFirst + static_cast<int>(c), -1, {}}; }

Cond cond_from_ast(const SqlAst& node) {
  Cond c;
  c.column = node.children.at(0).entity;
  switch (node.rule) {
    case rules::kCondCompare:
      c.kind = CondKind::Compare;
      c.cmp = cmp_from_ast(node.children.at(1));
      break;
    case rules::kCondIn:
    case rules::kCondNotIn:
      c.kind = node.rule == rules::kCondIn ? CondKind::In : CondKind::NotIn;
      c.sub = std::make_shared<const Query>(query_from_ast(node.children.at(1)));
      break;
    default: throw UsageError("expected a condition, found rule " + std::to_string(node.rule));
  }
  return c;
}

SqlAst cond_to_ast(const Cond& c) {
  switch (c.kind) {
    case CondKind::Compare:
      return {rules::kCondCompare, -1, {SqlAst::slot(c.column), cmp_to_ast(c.cmp)}};
    case CondKind::In:
    case CondKind::NotIn:
      if (!c.sub) throw UsageError("IN condition without a subquery");
      return {c.kind == CondKind::In ? rules::kCondIn : rules::kCondNotIn, -1,
              {SqlAst::slot(c.column), query_to_ast(*c.sub)}};
  }
  throw UsageError("bad condition");
}

void collect(const Query& q, std::vector<const Query*>& out) {
  out.push_back(&q);
  for (const Cond& c : q.where) {
    if (c.sub) collect(*c.sub, out);
  }
}

}  // namespace

std::string_view agg_name(Agg a) {
  switch (a) {
    case Agg::None: return "";
    case Agg::CountStar:
    case Agg::Count: return "count";
    case Agg::Sum: return "sum";
    case Agg::Avg: return "avg";
    case Agg::Min: return "min";
    case Agg::Max: return "max";
  }
  return "";
}

std::string_view cmp_text(Cmp c) {
  switch (c) {
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "!=";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
    case Cmp::Like: return "like";
  }
  return "?";
}

std::string_view set_op_name(SetOp op) {
  switch (op) {
    case SetOp::None: return "";
    case SetOp::Intersect: return "intersect";
    case SetOp::Union: return "union";
    case SetOp::Except: return "except";
  }
  return "";
}

bool operator==(const Cond& a, const Cond& b) {
  if (a.column != b.column || a.kind != b.kind) return false;
  if (a.kind == CondKind::Compare) return a.cmp == b.cmp;
  if (!a.sub || !b.sub) return a.sub == b.sub;
  return *a.sub == *b.sub;
}

std::vector<int> Query::tables() const {
  std::vector<int> out{from};
  for (const Join& j : joins) out.push_back(j.table);
  return out;
}

Query query_from_ast(const SqlAst& node) {
  const int mask = node.rule - rules::kQueryBase;
  if (mask < 0 || mask > 15) throw UsageError("expected a query, found rule " + std::to_string(node.rule));
  Query q;
  std::size_t child = 0;

  for (const SqlAst* cols = &node.children.at(child++);;) {
    q.select.push_back(agg_from_ast(cols->children.at(0).children.at(0)));
    if (cols->rule == rules::kSelColsOne) break;
    cols = &cols->children.at(1);
  }

  const SqlAst& from = node.children.at(child++);
  q.from = from.children.at(0).entity;
  if (from.rule == rules::kFromJoins) {
    for (const SqlAst* joins = &from.children.at(1);;) {
      const SqlAst& j = joins->children.at(0);
      q.joins.push_back({j.children.at(0).entity, j.children.at(1).entity, j.children.at(2).entity});
      if (joins->rule == rules::kJoinsOne) break;
      joins = &joins->children.at(1);
    }
  }

  if (mask & rules::kQueryWhere) {
    for (const SqlAst* conds = &node.children.at(child++).children.at(0);;) {
      q.where.push_back(cond_from_ast(conds->children.at(0)));
      if (conds->rule == rules::kCondsOne) break;
      q.connectors.push_back(conds->rule == rules::kCondsAnd ? Connector::And : Connector::Or);
      conds = &conds->children.at(1);
    }
  }
  if (mask & rules::kQueryGroupBy) {
    const SqlAst& g = node.children.at(child++);
    GroupBy gb{g.children.at(0).entity, std::nullopt};
    if (g.rule == rules::kGroupByHaving) {
      const SqlAst& h = g.children.at(1);
      gb.having = Having{agg_from_ast(h.children.at(0)), cmp_from_ast(h.children.at(1))};
    }
    q.group_by = gb;
  }
  if (mask & rules::kQueryOrderBy) {
    const SqlAst& o = node.children.at(child++);
    q.order_by = OrderBy{agg_from_ast(o.children.at(0)), o.rule == rules::kOrderDesc};
  }
  if (mask & rules::kQueryLimit) q.limit = true;
  return q;
}

SqlAst query_to_ast(const Query& q) {
  if (q.select.empty()) throw UsageError("query without select columns");
  if (!q.where.empty() && q.connectors.size() + 1 != q.where.size()) {
    throw UsageError("WHERE connectors do not match conditions");
  }
  int mask = 0;
  if (!q.where.empty()) mask |= rules::kQueryWhere;
  if (q.group_by) mask |= rules::kQueryGroupBy;
  if (q.order_by) mask |= rules::kQueryOrderBy;
  if (q.limit) mask |= rules::kQueryLimit;
  SqlAst node{rules::kQueryBase + mask, -1, {}};

  SqlAst cols;
  for (std::size_t i = q.select.size(); i-- > 0;) {
    SqlAst selcol{rules::kSelCol, -1, {agg_to_ast(q.select[i])}};
    if (i + 1 == q.select.size()) {
      cols = SqlAst{rules::kSelColsOne, -1, {std::move(selcol)}};
    } else {
      cols = SqlAst{rules::kSelColsMore, -1, {std::move(selcol), std::move(cols)}};
    }
  }
  node.children.push_back(std::move(cols));

  SqlAst from{q.joins.empty() ? rules::kFromTable : rules::kFromJoins, -1, {SqlAst::slot(q.from)}};
  if (!q.joins.empty()) {
    SqlAst joins;
    for (std::size_t i = q.joins.size(); i-- > 0;) {
      const Join& j = q.joins[i];
      SqlAst join{rules::kJoin, -1, {SqlAst::slot(j.table), SqlAst::slot(j.left), SqlAst::slot(j.right)}};
      if (i + 1 == q.joins.size()) {
        joins = SqlAst{rules::kJoinsOne, -1, {std::move(join)}};
      } else {
        joins = SqlAst{rules::kJoinsMore, -1, {std::move(join), std::move(joins)}};
      }
    }
    from.children.push_back(std::move(joins));
  }
  node.children.push_back(std::move(from));

  if (!q.where.empty()) {
    SqlAst conds;
    for (std::size_t i = q.where.size(); i-- > 0;) {
      SqlAst cond = cond_to_ast(q.where[i]);
      if (i + 1 == q.where.size()) {
        conds = SqlAst{rules::kCondsOne, -1, {std::move(cond)}};
      } else {
        const int rule = q.connectors[i] == Connector::And ? rules::kCondsAnd : rules::kCondsOr;
        conds = SqlAst{rule, -1, {std::move(cond), std::move(conds)}};
      }
    }
    node.children.push_back(SqlAst{rules::kWhere, -1, {std::move(conds)}});
  }
  if (q.group_by) {
    SqlAst g{q.group_by->having ? rules::kGroupByHaving : rules::kGroupBy, -1,
             {SqlAst::slot(q.group_by->column)}};
    if (q.group_by->having) {
      g.children.push_back(
          SqlAst{rules::kHaving, -1, {agg_to_ast(q.group_by->having->expr), cmp_to_ast(q.group_by->having->cmp)}});
    }
    node.children.push_back(std::move(g));
  }
  if (q.order_by) {
    node.children.push_back(SqlAst{q.order_by->descending ? rules::kOrderDesc : rules::kOrderAsc, -1,
                                   {agg_to_ast(q.order_by->expr)}});
  }
  if (q.limit) node.children.push_back(SqlAst{rules::kLimit, -1, {}});
  return node;
}

Statement statement_from_ast(const SqlAst& ast) {
  check_ast(ast);
  Statement s;
  s.left = query_from_ast(ast.children.at(0));
  switch (ast.rule) {
    case rules::kStmtSingle: return s;
    case rules::kStmtIntersect: s.op = SetOp::Intersect; break;
    case rules::kStmtUnion: s.op = SetOp::Union; break;
    case rules::kStmtExcept: s.op = SetOp::Except; break;
    default: throw UsageError("expected a statement");
  }
  s.right = query_from_ast(ast.children.at(1));
  return s;
}

SqlAst to_ast(const Statement& stmt) {
  if ((stmt.op == SetOp::None) != !stmt.right.has_value()) {
    throw UsageError("set operator and right operand must appear together");
  }
  SqlAst root{rules::kStmtSingle, -1, {query_to_ast(stmt.left)}};
  switch (stmt.op) {
    case SetOp::None: break;
    case SetOp::Intersect: root.rule = rules::kStmtIntersect; break;
    case SetOp::Union: root.rule = rules::kStmtUnion; break;
    case SetOp::Except: root.rule = rules::kStmtExcept; break;
  }
  if (stmt.right) root.children.push_back(query_to_ast(*stmt.right));
  return root;
}

std::vector<const Query*> all_queries(const Statement& stmt) {
  std::vector<const Query*> out;
  collect(stmt.left, out);
  if (stmt.right) collect(*stmt.right, out);
  return out;
}

}  // namespace linkgate::sql
