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

#include "linkgate/sql/ast.hpp"

#include "linkgate/error.hpp"

namespace linkgate::sql {
namespace {

void check_node(const SqlAst& node, const Symbol& expected, const std::string& path) {
  switch (expected.kind) {
    case SymbolKind::TableSlot:
    case SymbolKind::ColumnSlot:
      if (!node.is_slot() || node.entity < 0 || !node.children.empty()) {
        throw UsageError("malformed AST at " + path + ": expected a filled entity slot");
      }
      return;
    case SymbolKind::Nonterminal:
      break;
    case SymbolKind::Terminal:
      throw UsageError("malformed AST at " + path + ": terminal has no node");
  }
  if (node.is_slot()) {
    throw UsageError("malformed AST at " + path + ": expected " +
                     std::string(nonterminal_name(expected.nt)) + ", found an entity slot");
  }
  const Grammar& g = Grammar::instance();
  if (node.rule >= kRuleCount) throw UsageError("malformed AST at " + path + ": unknown rule");
  const Rule& rule = g.rule(node.rule);
  if (rule.lhs != expected.nt) {
    throw UsageError("malformed AST at " + path + ": rule " + std::to_string(node.rule) +
                     " does not expand " + std::string(nonterminal_name(expected.nt)));
  }
  if (node.children.size() != rule.children.size()) {
    throw UsageError("malformed AST at " + path + ": rule " + std::to_string(node.rule) +
                     " expects " + std::to_string(rule.children.size()) + " children, found " +
                     std::to_string(node.children.size()));
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    check_node(node.children[i], rule.children[i], path + "/" + std::to_string(i));
  }
}

void emit(const SqlAst& node, std::vector<Action>& out) {
  if (node.is_slot()) {
    out.push_back(Action::select_entity(node.entity));
    return;
  }
  out.push_back(Action::apply_rule(node.rule));
  for (const SqlAst& child : node.children) emit(child, out);
}

}  // namespace

std::string Action::to_string() const {
  return (is_rule() ? "ApplyRule(" : "SelectEntity(") + std::to_string(value) + ")";
}

Frontier ActionReplayer::frontier() const {
  if (!root_) return {Frontier::Kind::Nonterminal, Nonterminal::Stmt, -1, -1};
  if (stack_.empty()) return {Frontier::Kind::Done, Nonterminal::Stmt, -1, -1};
  const Open& top = stack_.back();
  const Rule& rule = Grammar::instance().rule(top.node->rule);
  const Symbol& sym = rule.children[top.next];
  const int child = static_cast<int>(top.next);
  switch (sym.kind) {
    case SymbolKind::TableSlot: return {Frontier::Kind::TableSlot, rule.lhs, rule.id, child};
    case SymbolKind::ColumnSlot: return {Frontier::Kind::ColumnSlot, rule.lhs, rule.id, child};
    default: return {Frontier::Kind::Nonterminal, sym.nt, rule.id, child};
  }
}

std::string ActionReplayer::illegal_reason(const Action& a, const Frontier& f) const {
  if (f.kind == Frontier::Kind::Done) return "trailing action " + a.to_string() + " after complete AST";
  if (a.is_rule()) {
    if (f.is_slot()) return a.to_string() + " where an entity slot is open";
    if (a.value < 0 || a.value >= kRuleCount) return "unknown rule " + std::to_string(a.value);
    const Rule& r = Grammar::instance().rule(a.value);
    if (r.lhs != f.nt) {
      return "rule " + std::to_string(a.value) + " (" + r.to_string() +
             ") is illegal for open nonterminal " + std::string(nonterminal_name(f.nt));
    }
    return {};
  }
  if (!f.is_slot()) {
    return a.to_string() + " where nonterminal " + std::string(nonterminal_name(f.nt)) + " is open";
  }
  if (a.value < 0) return "negative entity index";
  if (schema_ != nullptr) {
    if (static_cast<std::size_t>(a.value) >= schema_->size()) {
      return "entity " + std::to_string(a.value) + " out of range";
    }
    const bool table = schema_->is_table(static_cast<std::size_t>(a.value));
    if (table != (f.kind == Frontier::Kind::TableSlot)) {
      return "entity " + schema_->qualified_name(static_cast<std::size_t>(a.value)) +
             (table ? " is a table but a column slot is open" : " is a column but a table slot is open");
    }
  }
  return {};
}

bool ActionReplayer::legal(const Action& a) const { return illegal_reason(a, frontier()).empty(); }

void ActionReplayer::close_finished() {
  while (!stack_.empty()) {
    const Open& top = stack_.back();
    if (top.next < Grammar::instance().rule(top.node->rule).children.size()) break;
    stack_.pop_back();
  }
}

void ActionReplayer::apply(const Action& a) {
  const Frontier f = frontier();
  if (std::string reason = illegal_reason(a, f); !reason.empty()) throw DecodeError(reason, steps_);
  SqlAst* node = nullptr;
  if (!root_) {
    root_ = std::make_unique<SqlAst>();
    node = root_.get();
  } else {
    Open& top = stack_.back();
    // Capacity was reserved when the parent opened, so earlier pointers stay valid.
    top.node->children.emplace_back();
    node = &top.node->children.back();
    ++top.next;
  }
  if (a.is_rule()) {
    node->rule = a.value;
    node->children.reserve(Grammar::instance().rule(a.value).children.size());
    stack_.push_back({node, 0});
  } else {
    node->entity = a.value;
    ++entities_;
  }
  ++steps_;
  close_finished();
}

const SqlAst& ActionReplayer::ast() const {
  if (!complete()) throw DecodeError("incomplete AST", steps_);
  return *root_;
}

void check_ast(const SqlAst& ast) {
  check_node(ast, Symbol{SymbolKind::Nonterminal, Nonterminal::Stmt, {}}, "stmt");
}

std::vector<Action> linearize(const SqlAst& ast) {
  check_ast(ast);
  std::vector<Action> out;
  emit(ast, out);
  return out;
}

SqlAst delinearize(const std::vector<Action>& actions, const Schema* schema) {
  ActionReplayer replay(schema);
  for (const Action& a : actions) replay.apply(a);
  return replay.ast();
}

}  // namespace linkgate::sql
