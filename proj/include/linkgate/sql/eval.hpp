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

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "linkgate/sql/ast.hpp"
#include "linkgate/sql/query.hpp"

namespace linkgate::sql {

// Order-insensitive canonical text of a statement: select and FROM tables as
// multisets, join conditions as unordered column pairs, WHERE as OR-groups of
// AND-ed conditions, values ignored. Two statements match iff their
// canonical forms are equal.
std::string canonical_form(const Statement& stmt);
bool exact_set_match(const SqlAst& pred, const SqlAst& gold);

enum class Component { Select, From, Where, GroupBy, OrderBy, Iuen };
inline constexpr std::size_t kComponentCount = 6;
inline constexpr std::array<Component, kComponentCount> kComponents = {
    Component::Select, Component::From, Component::Where, Component::GroupBy, Component::OrderBy, Component::Iuen};
std::string_view component_name(Component c);

struct ComponentMatch {
  std::size_t gold = 0;     // units in the gold query
  std::size_t pred = 0;     // units in the prediction
  std::size_t matched = 0;  // multiset intersection size

  bool present() const { return gold > 0 || pred > 0; }
  // 1 when both sides lack the component.
  double f1() const;
};

using PartialMatch = std::array<ComponentMatch, kComponentCount>;

// Units: select items; FROM tables and join pairs; WHERE conditions; the
// GROUP BY column and HAVING clause; ORDER BY key and LIMIT; set operations
// and nested subqueries (each compared by canonical form).
PartialMatch partial_match(const SqlAst& pred, const SqlAst& gold);

enum class Hardness { Easy, Medium, Hard, Extra };
inline constexpr std::size_t kHardnessCount = 4;
std::string_view hardness_name(Hardness h);
int hardness_score(const Statement& stmt);
Hardness classify_hardness(const SqlAst& ast);

enum class ViolationKind { OnSelfEquality, DuplicateSelect, GroupByOutsideFrom };
std::string_view violation_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

std::vector<Violation> validate_wellformedness(const SqlAst& ast, const Schema* schema = nullptr);

}  // namespace linkgate::sql
