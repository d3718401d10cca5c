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

#include "linkgate/sql/eval.hpp"

#include <algorithm>
#include <map>

namespace linkgate::sql {
namespace {

std::string agg_key(const AggExpr& a) {
  if (a.agg == Agg::CountStar) return "count(*)";
  return std::string(agg_name(a.agg)) + "(" + std::to_string(a.column) + ")";
}

std::string pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return "{" + std::to_string(a) + "," + std::to_string(b) + "}";
}

std::string join_sorted(std::vector<std::string> parts, std::string_view sep) {
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string canonical_query(const Query& q);

std::string cond_key(const Cond& c) {
  std::string out = std::to_string(c.column);
  switch (c.kind) {
    case CondKind::Compare: return out + " " + std::string(cmp_text(c.cmp));
    case CondKind::In: return out + " in (" + canonical_query(*c.sub) + ")";
    case CondKind::NotIn: return out + " not in (" + canonical_query(*c.sub) + ")";
  }
  return out;
}

// AND binds tighter than OR.
std::string where_key(const Query& q) {
  std::vector<std::string> groups;
  std::vector<std::string> current;
  for (std::size_t i = 0; i < q.where.size(); ++i) {
    current.push_back(cond_key(q.where[i]));
    if (i + 1 == q.where.size() || q.connectors[i] == Connector::Or) {
      groups.push_back("(" + join_sorted(std::move(current), " and ") + ")");
      current.clear();
    }
  }
  return join_sorted(std::move(groups), " or ");
}

std::vector<std::string> select_units(const Query& q) {
  std::vector<std::string> out;
  for (const AggExpr& a : q.select) out.push_back(agg_key(a));
  return out;
}

std::vector<std::string> from_units(const Query& q) {
  std::vector<std::string> out;
  for (int t : q.tables()) out.push_back("t" + std::to_string(t));
  for (const Join& j : q.joins) out.push_back(pair_key(j.left, j.right));
  return out;
}

std::vector<std::string> where_units(const Query& q) {
  std::vector<std::string> out;
  for (const Cond& c : q.where) out.push_back(cond_key(c));
  return out;
}

std::vector<std::string> group_units(const Query& q) {
  std::vector<std::string> out;
  if (q.group_by) {
    out.push_back("group " + std::to_string(q.group_by->column));
    if (q.group_by->having) {
      out.push_back("having " + agg_key(q.group_by->having->expr) + " " +
                    std::string(cmp_text(q.group_by->having->cmp)));
    }
  }
  return out;
}

std::vector<std::string> order_units(const Query& q) {
  std::vector<std::string> out;
  if (q.order_by) out.push_back("order " + agg_key(q.order_by->expr) + (q.order_by->descending ? " desc" : " asc"));
  if (q.limit) out.push_back("limit");
  return out;
}

std::string canonical_query(const Query& q) {
  std::string out = "select[" + join_sorted(select_units(q), ",") + "]";
  std::vector<std::string> tables;
  for (int t : q.tables()) tables.push_back(std::to_string(t));
  std::vector<std::string> pairs;
  for (const Join& j : q.joins) pairs.push_back(pair_key(j.left, j.right));
  out += " from[" + join_sorted(tables, ",") + "|" + join_sorted(pairs, ",") + "]";
  if (!q.where.empty()) out += " where[" + where_key(q) + "]";
  const auto g = group_units(q);
  if (!g.empty()) out += " " + join_sorted(g, " ");
  const auto o = order_units(q);
  if (!o.empty()) out += " " + join_sorted(o, " ");
  return out;
}

std::vector<std::string> iuen_units(const Statement& s) {
  std::vector<std::string> out;
  if (s.right) out.push_back(std::string(set_op_name(s.op)) + " " + canonical_query(*s.right));
  for (const Query* q : all_queries(s)) {
    for (const Cond& c : q->where) {
      if (c.sub) out.push_back(std::string(c.kind == CondKind::In ? "in " : "not in ") + canonical_query(*c.sub));
    }
  }
  return out;
}

ComponentMatch count_match(std::vector<std::string> pred, std::vector<std::string> gold) {
  ComponentMatch m;
  m.pred = pred.size();
  m.gold = gold.size();
  std::map<std::string, int> counts;
  for (const auto& g : gold) ++counts[g];
  for (const auto& p : pred) {
    if (auto it = counts.find(p); it != counts.end() && it->second > 0) {
      --it->second;
      ++m.matched;
    }
  }
  return m;
}

}  // namespace

std::string canonical_form(const Statement& stmt) {
  std::string out = canonical_query(stmt.left);
  if (stmt.right) out += " " + std::string(set_op_name(stmt.op)) + " " + canonical_query(*stmt.right);
  return out;
}

bool exact_set_match(const SqlAst& pred, const SqlAst& gold) {
  return canonical_form(statement_from_ast(pred)) == canonical_form(statement_from_ast(gold));
}

std::string_view component_name(Component c) {
  switch (c) {
    case Component::Select: return "select";
    case Component::From: return "from";
    case Component::Where: return "where";
    case Component::GroupBy: return "groupby";
    case Component::OrderBy: return "orderby";
    case Component::Iuen: return "iuen";
  }
  return "?";
}

double ComponentMatch::f1() const {
  if (!present()) return 1.0;
  if (matched == 0) return 0.0;
  const double p = static_cast<double>(matched) / static_cast<double>(pred);
  const double r = static_cast<double>(matched) / static_cast<double>(gold);
  return 2.0 * p * r / (p + r);
}

PartialMatch partial_match(const SqlAst& pred, const SqlAst& gold) {
  const Statement p = statement_from_ast(pred);
  const Statement g = statement_from_ast(gold);
  PartialMatch out;
  out[0] = count_match(select_units(p.left), select_units(g.left));
  out[1] = count_match(from_units(p.left), from_units(g.left));
  out[2] = count_match(where_units(p.left), where_units(g.left));
  out[3] = count_match(group_units(p.left), group_units(g.left));
  out[4] = count_match(order_units(p.left), order_units(g.left));
  out[5] = count_match(iuen_units(p), iuen_units(g));
  return out;
}

std::string_view hardness_name(Hardness h) {
  switch (h) {
    case Hardness::Easy: return "easy";
    case Hardness::Medium: return "medium";
    case Hardness::Hard: return "hard";
    case Hardness::Extra: return "extra";
  }
  return "?";
}

int hardness_score(const Statement& stmt) {
  int joins = 0, conds = 0;
  bool group = false, order = false, multi_select = false, having_or_limit = false, nested = stmt.right.has_value();
  for (const Query* q : all_queries(stmt)) {
    joins += static_cast<int>(q->joins.size());
    conds += static_cast<int>(q->where.size());
    group |= q->group_by.has_value();
    order |= q->order_by.has_value();
    multi_select |= q->select.size() > 1;
    having_or_limit |= q->limit || (q->group_by && q->group_by->having);
    for (const Cond& c : q->where) nested |= c.sub != nullptr;
  }
  return joins + conds + group + order + 2 * nested + multi_select + having_or_limit;
}

Hardness classify_hardness(const SqlAst& ast) {
  const int score = hardness_score(statement_from_ast(ast));
  if (score <= 1) return Hardness::Easy;
  if (score <= 3) return Hardness::Medium;
  if (score <= 5) return Hardness::Hard;
  return Hardness::Extra;
}

std::string_view violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::OnSelfEquality: return "on_self_equality";
    case ViolationKind::DuplicateSelect: return "duplicate_select";
    case ViolationKind::GroupByOutsideFrom: return "group_by_outside_from";
  }
  return "?";
}

std::vector<Violation> validate_wellformedness(const SqlAst& ast, const Schema* schema) {
  const Statement stmt = statement_from_ast(ast);
  auto name = [&](int e) {
    if (schema != nullptr && e >= 0 && static_cast<std::size_t>(e) < schema->size()) {
      return schema->qualified_name(static_cast<std::size_t>(e));
    }
    return "#" + std::to_string(e);
  };
  std::vector<Violation> out;
  for (const Query* q : all_queries(stmt)) {
    for (const Join& j : q->joins) {
      if (j.left == j.right) {
        out.push_back({ViolationKind::OnSelfEquality, "ON " + name(j.left) + " = " + name(j.right)});
      }
    }
    for (std::size_t i = 0; i < q->select.size(); ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        if (q->select[i] == q->select[k]) {
          out.push_back({ViolationKind::DuplicateSelect, "select item " + std::to_string(i) + " repeats item " +
                                                            std::to_string(k)});
          break;
        }
      }
    }
    if (q->group_by && schema != nullptr) {
      const int c = q->group_by->column;
      const auto tables = q->tables();
      const bool inside = c >= 0 && static_cast<std::size_t>(c) < schema->size() &&
                          std::find(tables.begin(), tables.end(),
                                    static_cast<int>(schema->entity(static_cast<std::size_t>(c)).table)) != tables.end();
      if (!inside) out.push_back({ViolationKind::GroupByOutsideFrom, "GROUP BY " + name(c)});
    }
  }
  return out;
}

}  // namespace linkgate::sql
