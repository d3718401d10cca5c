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

#include <string>
#include <string_view>
#include <vector>

#include "linkgate/schema/schema.hpp"
#include "linkgate/sql/ast.hpp"
#include "linkgate/sql/query.hpp"

namespace linkgate::sql {

// Parses the supported SQL subset. Keywords and names are case-insensitive;
// `AS` aliases and bare aliases are accepted; bare columns resolve against
// the FROM tables first and then against the whole schema when unambiguous.
// Literals become VALUE placeholders. Throws ParseError with the byte offset.
SqlAst parse_sql(std::string_view text, const Schema& schema);
Statement parse_statement(std::string_view text, const Schema& schema);

struct RenderOptions {
  // Literal spellings substituted for VALUE placeholders in textual order;
  // missing entries render as 'value' (or 1 after LIMIT).
  std::vector<std::string> values;
};

// Canonical text: lowercase keywords, bare column names for single-table
// queries, t1..tn aliases when a query joins tables.
std::string render_sql(const SqlAst& ast, const Schema& schema, const RenderOptions& options = {});
std::string render_statement(const Statement& stmt, const Schema& schema,
                             const RenderOptions& options = {});

}  // namespace linkgate::sql
