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
#include <memory>
#include <string>
#include <vector>

#include "linkgate/schema/schema.hpp"
#include "linkgate/sql/grammar.hpp"

namespace linkgate::sql {

// A rule application (rule >= 0) or a filled entity slot (rule == -1).
// Children follow the non-terminal symbols of the rule's right-hand side.
struct SqlAst {
  int rule = -1;
  int entity = -1;
  std::vector<SqlAst> children;

  bool is_slot() const { return rule < 0; }
  static SqlAst slot(int entity) { return SqlAst{-1, entity, {}}; }

  friend bool operator==(const SqlAst&, const SqlAst&) = default;
};

struct Action {
  enum class Kind { ApplyRule, SelectEntity };
  Kind kind = Kind::ApplyRule;
  int value = 0;

  static Action apply_rule(int rule) { return {Kind::ApplyRule, rule}; }
  static Action select_entity(int entity) { return {Kind::SelectEntity, entity}; }
  bool is_rule() const { return kind == Kind::ApplyRule; }
  std::string to_string() const;

  friend bool operator==(const Action&, const Action&) = default;
};

// What the next action must expand.
struct Frontier {
  enum class Kind { Nonterminal, TableSlot, ColumnSlot, Done };
  Kind kind = Kind::Nonterminal;
  Nonterminal nt = Nonterminal::Stmt;  // the open nonterminal, or the owner of a slot
  int owner_rule = -1;                 // rule whose right-hand side holds the symbol
  int child = -1;                      // position of the symbol among the rule's children

  bool is_slot() const { return kind == Kind::TableSlot || kind == Kind::ColumnSlot; }
};

// Incremental depth-first AST construction: each action expands the leftmost
// open symbol. Slot kinds are checked against the schema when one is given.
class ActionReplayer {
 public:
  explicit ActionReplayer(const Schema* schema = nullptr) : schema_(schema) {}
  ActionReplayer(const ActionReplayer&) = delete;
  ActionReplayer& operator=(const ActionReplayer&) = delete;
  ActionReplayer(ActionReplayer&&) = default;
  ActionReplayer& operator=(ActionReplayer&&) = default;

  Frontier frontier() const;
  bool complete() const { return root_ != nullptr && stack_.empty(); }
  bool legal(const Action& a) const;
  // Throws DecodeError naming the step when the action is illegal.
  void apply(const Action& a);
  std::size_t steps() const { return steps_; }
  std::size_t entity_count() const { return entities_; }
  // The finished tree; throws DecodeError("incomplete AST") before completion.
  const SqlAst& ast() const;

 private:
  struct Open {
    SqlAst* node;
    std::size_t next;
  };
  void close_finished();
  std::string illegal_reason(const Action& a, const Frontier& f) const;

  const Schema* schema_ = nullptr;
  std::unique_ptr<SqlAst> root_;
  std::vector<Open> stack_;
  std::size_t steps_ = 0;
  std::size_t entities_ = 0;
};

// Depth-first, left-to-right action sequence. Throws UsageError when the
// tree does not match the grammar.
std::vector<Action> linearize(const SqlAst& ast);
SqlAst delinearize(const std::vector<Action>& actions, const Schema* schema = nullptr);

// Throws UsageError describing the first structural mismatch.
void check_ast(const SqlAst& ast);

}  // namespace linkgate::sql
