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
#include <string>
#include <string_view>
#include <vector>

namespace linkgate::sql {

enum class Nonterminal {
  Stmt,
  Query,
  SelCols,
  SelCol,
  AggExpr,
  From,
  Joins,
  Join,
  Where,
  Conds,
  Cond,
  Cmp,
  GroupBy,
  Having,
  OrderBy,
  Limit,
};
inline constexpr std::size_t kNonterminalCount = 16;

std::string_view nonterminal_name(Nonterminal nt);

enum class SymbolKind { Terminal, Nonterminal, TableSlot, ColumnSlot };

struct Symbol {
  SymbolKind kind = SymbolKind::Terminal;
  Nonterminal nt = Nonterminal::Stmt;  // meaningful for SymbolKind::Nonterminal
  std::string_view text;               // terminal spelling

  bool is_child() const { return kind != SymbolKind::Terminal; }
};

struct Rule {
  int id = 0;
  Nonterminal lhs = Nonterminal::Stmt;
  std::vector<Symbol> rhs;
  std::vector<Symbol> children;  // rhs without terminals, in order

  std::string to_string() const;
};

// Stable rule ids.
namespace rules {
inline constexpr int kStmtSingle = 0;
inline constexpr int kStmtIntersect = 1;
inline constexpr int kStmtUnion = 2;
inline constexpr int kStmtExcept = 3;
// query -> SELECT selcols from [where] [groupby] [orderby] [limit]; the id
// is kQueryBase plus a bitmask of the optional clauses present.
inline constexpr int kQueryBase = 4;
inline constexpr int kQueryWhere = 1;
inline constexpr int kQueryGroupBy = 2;
inline constexpr int kQueryOrderBy = 4;
inline constexpr int kQueryLimit = 8;
inline constexpr int kSelColsOne = 20;
inline constexpr int kSelColsMore = 21;
inline constexpr int kSelCol = 22;
inline constexpr int kAggColumn = 23;
inline constexpr int kAggCountStar = 24;
inline constexpr int kAggCount = 25;
inline constexpr int kAggSum = 26;
inline constexpr int kAggAvg = 27;
inline constexpr int kAggMin = 28;
inline constexpr int kAggMax = 29;
inline constexpr int kFromTable = 30;
inline constexpr int kFromJoins = 31;
inline constexpr int kJoinsOne = 32;
inline constexpr int kJoinsMore = 33;
inline constexpr int kJoin = 34;
inline constexpr int kWhere = 35;
inline constexpr int kCondsOne = 36;
inline constexpr int kCondsAnd = 37;
inline constexpr int kCondsOr = 38;
inline constexpr int kCondCompare = 39;
inline constexpr int kCondIn = 40;
inline constexpr int kCondNotIn = 41;
inline constexpr int kCmpFirst = 42;  // = != < <= > >= LIKE
inline constexpr int kGroupBy = 49;
inline constexpr int kGroupByHaving = 50;
inline constexpr int kHaving = 51;
inline constexpr int kOrderAsc = 52;
inline constexpr int kOrderDesc = 53;
inline constexpr int kLimit = 54;
}  // namespace rules

inline constexpr int kRuleCount = 55;

class Grammar {
 public:
  static const Grammar& instance();

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(int id) const;
  std::size_t size() const { return rules_.size(); }
  // Rule ids whose left-hand side is nt, ascending.
  const std::vector<int>& rules_for(Nonterminal nt) const {
    return by_lhs_[static_cast<std::size_t>(nt)];
  }

 private:
  Grammar();

  std::vector<Rule> rules_;
  std::vector<std::vector<int>> by_lhs_;
};

}  // namespace linkgate::sql
