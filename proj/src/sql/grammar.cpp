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

#include "linkgate/sql/grammar.hpp"

#include "linkgate/error.hpp"

namespace linkgate::sql {
namespace {

Symbol t(std::string_view text) { return {SymbolKind::Terminal, Nonterminal::Stmt, text}; }
Symbol n(Nonterminal nt) { return {SymbolKind::Nonterminal, nt, {}}; }
Symbol table_slot() { return {SymbolKind::TableSlot, Nonterminal::Stmt, {}}; }
Symbol column_slot() { return {SymbolKind::ColumnSlot, Nonterminal::Stmt, {}}; }

using NT = Nonterminal;

}  // namespace

std::string_view nonterminal_name(Nonterminal nt) {
  switch (nt) {
    case NT::Stmt: return "stmt";
    case NT::Query: return "query";
    case NT::SelCols: return "selcols";
    case NT::SelCol: return "selcol";
    case NT::AggExpr: return "aggexpr";
    case NT::From: return "from";
    case NT::Joins: return "joins";
    case NT::Join: return "join";
    case NT::Where: return "where";
    case NT::Conds: return "conds";
    case NT::Cond: return "cond";
    case NT::Cmp: return "cmp";
    case NT::GroupBy: return "groupby";
    case NT::Having: return "having";
    case NT::OrderBy: return "orderby";
    case NT::Limit: return "limit";
  }
  return "?";
}

std::string Rule::to_string() const {
  std::string out(nonterminal_name(lhs));
  out += " ->";
  for (const Symbol& s : rhs) {
    out += ' ';
    switch (s.kind) {
      case SymbolKind::Terminal: out += s.text; break;
      case SymbolKind::Nonterminal: out += nonterminal_name(s.nt); break;
      case SymbolKind::TableSlot: out += "TABLE_SLOT"; break;
      case SymbolKind::ColumnSlot: out += "COLUMN_SLOT"; break;
    }
  }
  return out;
}

Grammar::Grammar() {
  auto add = [&](NT lhs, std::vector<Symbol> rhs) {
    Rule r;
    r.id = static_cast<int>(rules_.size());
    r.lhs = lhs;
    r.rhs = std::move(rhs);
    for (const Symbol& s : r.rhs) {
      if (s.is_child()) r.children.push_back(s);
    }
    rules_.push_back(std::move(r));
  };

  add(NT::Stmt, {n(NT::Query)});
  add(NT::Stmt, {n(NT::Query), t("INTERSECT"), n(NT::Query)});
  add(NT::Stmt, {n(NT::Query), t("UNION"), n(NT::Query)});
  add(NT::Stmt, {n(NT::Query), t("EXCEPT"), n(NT::Query)});
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<Symbol> rhs = {t("SELECT"), n(NT::SelCols), n(NT::From)};
    if (mask & rules::kQueryWhere) rhs.push_back(n(NT::Where));
    if (mask & rules::kQueryGroupBy) rhs.push_back(n(NT::GroupBy));
    if (mask & rules::kQueryOrderBy) rhs.push_back(n(NT::OrderBy));
    if (mask & rules::kQueryLimit) rhs.push_back(n(NT::Limit));
    add(NT::Query, std::move(rhs));
  }
  add(NT::SelCols, {n(NT::SelCol)});
  add(NT::SelCols, {n(NT::SelCol), t(","), n(NT::SelCols)});
  add(NT::SelCol, {n(NT::AggExpr)});
  add(NT::AggExpr, {column_slot()});
  add(NT::AggExpr, {t("COUNT"), t("("), t("*"), t(")")});
  for (std::string_view agg : {"COUNT", "SUM", "AVG", "MIN", "MAX"}) {
    add(NT::AggExpr, {t(agg), t("("), column_slot(), t(")")});
  }
  add(NT::From, {t("FROM"), table_slot()});
  add(NT::From, {t("FROM"), table_slot(), n(NT::Joins)});
  add(NT::Joins, {n(NT::Join)});
  add(NT::Joins, {n(NT::Join), n(NT::Joins)});
  add(NT::Join, {t("JOIN"), table_slot(), t("ON"), column_slot(), t("="), column_slot()});
  add(NT::Where, {t("WHERE"), n(NT::Conds)});
  add(NT::Conds, {n(NT::Cond)});
  add(NT::Conds, {n(NT::Cond), t("AND"), n(NT::Conds)});
  add(NT::Conds, {n(NT::Cond), t("OR"), n(NT::Conds)});
  add(NT::Cond, {column_slot(), n(NT::Cmp), t("VALUE")});
  add(NT::Cond, {column_slot(), t("IN"), t("("), n(NT::Query), t(")")});
  add(NT::Cond, {column_slot(), t("NOT"), t("IN"), t("("), n(NT::Query), t(")")});
  for (std::string_view op : {"=", "!=", "<", "<=", ">", ">=", "LIKE"}) add(NT::Cmp, {t(op)});
  add(NT::GroupBy, {t("GROUP"), t("BY"), column_slot()});
  add(NT::GroupBy, {t("GROUP"), t("BY"), column_slot(), n(NT::Having)});
  add(NT::Having, {t("HAVING"), n(NT::AggExpr), n(NT::Cmp), t("VALUE")});
  add(NT::OrderBy, {t("ORDER"), t("BY"), n(NT::AggExpr), t("ASC")});
  add(NT::OrderBy, {t("ORDER"), t("BY"), n(NT::AggExpr), t("DESC")});
  add(NT::Limit, {t("LIMIT"), t("VALUE")});

  by_lhs_.resize(kNonterminalCount);
  for (const Rule& r : rules_) by_lhs_[static_cast<std::size_t>(r.lhs)].push_back(r.id);
}

const Grammar& Grammar::instance() {
  static const Grammar grammar;
  return grammar;
}

const Rule& Grammar::rule(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= rules_.size()) {
    throw UsageError("rule id " + std::to_string(id) + " out of range");
  }
  return rules_[static_cast<std::size_t>(id)];
}

}  // namespace linkgate::sql
