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

#include "linkgate/sql/sql_text.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "linkgate/error.hpp"
#include "linkgate/schema/text.hpp"

namespace linkgate::sql {
namespace {

enum class TokKind { Ident, Number, String, Symbol, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;  // identifiers lowercased
  std::size_t pos = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      out.push_back({TokKind::Ident, to_lower(s.substr(start, i - start)), start});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      out.push_back({TokKind::Number, std::string(s.substr(start, i - start)), start});
    } else if (c == '\'' || c == '"') {
      ++i;
      while (i < s.size() && s[i] != c) ++i;
      if (i == s.size()) throw ParseError("unterminated string literal", start);
      ++i;
      out.push_back({TokKind::String, std::string(s.substr(start, i - start)), start});
    } else {
      std::string sym(1, c);
      if (i + 1 < s.size()) {
        const std::string two{c, s[i + 1]};
        if (two == "!=" || two == "<>" || two == "<=" || two == ">=") sym = two;
      }
      if (std::string_view("(),.*=<>!;-").find(c) == std::string_view::npos) {
        throw ParseError(std::string("unexpected character '") + c + "'", start);
      }
      if (sym == "!") throw ParseError("unexpected character '!'", start);
      i += sym.size();
      out.push_back({TokKind::Symbol, sym, start});
    }
  }
  out.push_back({TokKind::End, "", s.size()});
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "select", "from", "where", "group", "by", "order", "having", "limit", "join", "on",
      "as", "and", "or", "not", "in", "like", "asc", "desc", "intersect", "union", "except",
      "distinct", "between", "is", "null", "exists"};
  return k;
}

struct Scope {
  std::vector<int> tables;
  std::map<std::string, int> aliases;
};

class Parser {
 public:
  Parser(std::string_view text, const Schema& schema) : toks_(lex(text)), schema_(schema) {}

  Statement statement() {
    Statement s;
    s.left = query();
    if (accept_word("intersect")) {
      s.op = SetOp::Intersect;
    } else if (accept_word("union")) {
      s.op = SetOp::Union;
    } else if (accept_word("except")) {
      s.op = SetOp::Except;
    }
    if (s.op != SetOp::None) {
      if (accept_word("all")) fail("UNION ALL is not supported");
      s.right = query();
    }
    accept_symbol(";");
    if (peek().kind != TokKind::End) fail("unexpected '" + peek().text + "'");
    return s;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const { throw ParseError(msg, pos); }

  bool is_word(const Token& t, std::string_view w) const { return t.kind == TokKind::Ident && t.text == w; }
  bool accept_word(std::string_view w) {
    if (!is_word(peek(), w)) return false;
    ++i_;
    return true;
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail("expected '" + std::string(w) + "'");
  }
  bool accept_symbol(std::string_view s) {
    if (peek().kind != TokKind::Symbol || peek().text != s) return false;
    ++i_;
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("expected '" + std::string(s) + "'");
  }

  // Index of the FROM keyword that belongs to the query starting at i_.
  std::size_t find_from() const {
    int depth = 0;
    for (std::size_t j = i_; j < toks_.size(); ++j) {
      const Token& t = toks_[j];
      if (t.kind == TokKind::Symbol && t.text == "(") ++depth;
      if (t.kind == TokKind::Symbol && t.text == ")") --depth;
      if (depth < 0 || t.kind == TokKind::End) break;
      if (depth == 0 && is_word(t, "from")) return j;
    }
    fail("missing FROM clause");
  }

  int table_name() {
    const Token& t = peek();
    if (t.kind != TokKind::Ident || keywords().count(t.text)) fail("expected a table name");
    const auto id = schema_.find_table(t.text);
    if (!id) fail("unknown table '" + t.text + "'");
    ++i_;
    return static_cast<int>(*id);
  }

  void table_ref(Scope& scope) {
    const int table = table_name();
    scope.tables.push_back(table);
    const bool explicit_as = accept_word("as");
    const Token& t = peek();
    if (t.kind == TokKind::Ident && !keywords().count(t.text)) {
      scope.aliases[t.text] = table;
      ++i_;
    } else if (explicit_as) {
      fail("expected an alias after AS");
    }
  }

  int column_ref(const Scope& scope) {
    const Token first = peek();
    if (first.kind != TokKind::Ident || keywords().count(first.text)) fail("expected a column");
    ++i_;
    if (accept_symbol(".")) {
      const Token name = peek();
      if (name.kind != TokKind::Ident) fail("expected a column name after '.'");
      ++i_;
      std::optional<std::size_t> table;
      if (auto it = scope.aliases.find(first.text); it != scope.aliases.end()) {
        table = static_cast<std::size_t>(it->second);
      } else {
        table = schema_.find_table(first.text);
      }
      if (!table) fail_at("unknown table or alias '" + first.text + "'", first.pos);
      const auto col = schema_.find_column(*table, name.text);
      if (!col) fail_at("unknown column '" + first.text + "." + name.text + "'", name.pos);
      return static_cast<int>(*col);
    }
    std::vector<std::size_t> hits;
    for (int t : scope.tables) {
      if (auto c = schema_.find_column(static_cast<std::size_t>(t), first.text)) {
        if (std::find(hits.begin(), hits.end(), *c) == hits.end()) hits.push_back(*c);
      }
    }
    if (hits.empty()) {
      for (std::size_t t : schema_.tables()) {
        if (auto c = schema_.find_column(t, first.text)) hits.push_back(*c);
      }
    }
    if (hits.empty()) fail_at("unknown column '" + first.text + "'", first.pos);
    if (hits.size() > 1) fail_at("ambiguous column '" + first.text + "'", first.pos);
    return static_cast<int>(hits[0]);
  }

  void skip_column_ref() {
    if (peek().kind != TokKind::Ident) fail("expected a column");
    ++i_;
    if (accept_symbol(".")) {
      if (peek().kind != TokKind::Ident) fail("expected a column name after '.'");
      ++i_;
    }
  }

  AggExpr agg_expr(const Scope& scope) {
    static const std::map<std::string, Agg> aggs = {
        {"count", Agg::Count}, {"sum", Agg::Sum}, {"avg", Agg::Avg}, {"min", Agg::Min}, {"max", Agg::Max}};
    const Token& t = peek();
    if (t.kind == TokKind::Ident && peek(1).kind == TokKind::Symbol && peek(1).text == "(") {
      const auto it = aggs.find(t.text);
      if (it == aggs.end()) fail("unsupported function '" + t.text + "'");
      i_ += 2;
      if (is_word(peek(), "distinct")) fail("DISTINCT is not supported");
      AggExpr e;
      if (accept_symbol("*")) {
        if (it->second != Agg::Count) fail_at(t.text + "(*) is not supported", t.pos);
        e = {Agg::CountStar, -1};
      } else {
        e = {it->second, column_ref(scope)};
      }
      expect_symbol(")");
      return e;
    }
    if (t.kind == TokKind::Symbol && t.text == "*") fail("bare '*' is not supported; use count(*)");
    return {Agg::None, column_ref(scope)};
  }

  Cmp cmp() {
    const Token& t = peek();
    static const std::map<std::string, Cmp> ops = {{"=", Cmp::Eq},  {"!=", Cmp::Ne}, {"<>", Cmp::Ne},
                                                   {"<", Cmp::Lt},  {"<=", Cmp::Le}, {">", Cmp::Gt},
                                                   {">=", Cmp::Ge}};
    if (t.kind == TokKind::Symbol) {
      if (auto it = ops.find(t.text); it != ops.end()) {
        ++i_;
        return it->second;
      }
    }
    if (accept_word("like")) return Cmp::Like;
    fail("expected a comparison operator");
  }

  void value() {
    accept_symbol("-");
    const Token& t = peek();
    if (t.kind == TokKind::Number || t.kind == TokKind::String) {
      ++i_;
      return;
    }
    if (t.kind == TokKind::Ident && !keywords().count(t.text)) {
      fail("comparison against a column is not supported; expected a literal");
    }
    fail("expected a literal value");
  }

  Cond cond(const Scope& scope) {
    Cond c;
    c.column = column_ref(scope);
    const bool negated = accept_word("not");
    if (accept_word("in")) {
      c.kind = negated ? CondKind::NotIn : CondKind::In;
      expect_symbol("(");
      c.sub = std::make_shared<const Query>(query());
      expect_symbol(")");
      return c;
    }
    if (negated) fail("expected IN after NOT");
    if (is_word(peek(), "between")) fail("BETWEEN is not supported");
    c.cmp = cmp();
    value();
    return c;
  }

  Query query() {
    const std::size_t select_pos = peek().pos;
    expect_word("select");
    if (is_word(peek(), "distinct")) fail("DISTINCT is not supported");
    const std::size_t select_begin = i_;
    const std::size_t from_index = find_from();

    Query q;
    Scope scope;
    // Aliases are visible to every ON clause, so collect them first.
    i_ = from_index + 1;
    table_ref(scope);
    while (accept_word("join")) {
      table_ref(scope);
      expect_word("on");
      skip_column_ref();
      expect_symbol("=");
      skip_column_ref();
    }
    i_ = from_index + 1;
    Scope collected = std::move(scope);
    scope = Scope{{}, collected.aliases};
    table_ref(scope);
    q.from = scope.tables[0];
    while (accept_word("join")) {
      table_ref(scope);
      Join j;
      j.table = scope.tables.back();
      expect_word("on");
      j.left = column_ref(scope);
      expect_symbol("=");
      j.right = column_ref(scope);
      q.joins.push_back(j);
    }
    if (peek().kind == TokKind::Symbol && peek().text == ",") fail("comma joins are not supported");
    const std::size_t after_from = i_;

    i_ = select_begin;
    do {
      q.select.push_back(agg_expr(scope));
    } while (accept_symbol(","));
    if (i_ != from_index) fail("expected FROM");
    if (q.select.empty()) fail_at("empty select list", select_pos);
    i_ = after_from;

    if (accept_word("where")) {
      q.where.push_back(cond(scope));
      for (;;) {
        if (accept_word("and")) {
          q.connectors.push_back(Connector::And);
        } else if (accept_word("or")) {
          q.connectors.push_back(Connector::Or);
        } else {
          break;
        }
        q.where.push_back(cond(scope));
      }
    }
    if (accept_word("group")) {
      expect_word("by");
      GroupBy g{column_ref(scope), std::nullopt};
      if (peek().kind == TokKind::Symbol && peek().text == ",") fail("multiple GROUP BY columns are not supported");
      if (accept_word("having")) {
        Having h;
        h.expr = agg_expr(scope);
        h.cmp = cmp();
        value();
        g.having = h;
      }
      q.group_by = g;
    }
    if (accept_word("order")) {
      expect_word("by");
      OrderBy o{agg_expr(scope), false};
      if (accept_word("desc")) {
        o.descending = true;
      } else {
        accept_word("asc");
      }
      if (peek().kind == TokKind::Symbol && peek().text == ",") fail("multiple ORDER BY keys are not supported");
      q.order_by = o;
    }
    if (accept_word("limit")) {
      if (peek().kind != TokKind::Number) fail("expected a number after LIMIT");
      ++i_;
      q.limit = true;
    }
    return q;
  }

  std::vector<Token> toks_;
  const Schema& schema_;
  std::size_t i_ = 0;
};

class Renderer {
 public:
  Renderer(const Schema& schema, const RenderOptions& options) : schema_(schema), options_(options) {}

  std::string statement(const Statement& s) {
    std::string out = query(s.left);
    if (s.right) {
      out += " ";
      out += set_op_name(s.op);
      out += " " + query(*s.right);
    }
    return out;
  }

 private:
  const Entity& entity(int e) const {
    if (e < 0 || static_cast<std::size_t>(e) >= schema_.size()) {
      throw UsageError("entity " + std::to_string(e) + " out of range for schema " + schema_.db_id());
    }
    return schema_.entity(static_cast<std::size_t>(e));
  }

  std::string next_value(bool limit) {
    if (value_index_ < options_.values.size()) return options_.values[value_index_++];
    ++value_index_;
    return limit ? "1" : "'value'";
  }

  std::string query(const Query& q) {
    std::map<int, std::string> alias;
    const std::vector<int> tables = q.tables();
    if (!q.joins.empty()) {
      for (std::size_t i = 0; i < tables.size(); ++i) alias.emplace(tables[i], "t" + std::to_string(i + 1));
    }
    auto col = [&](int c) {
      const Entity& e = entity(c);
      if (e.kind == EntityKind::Table) return e.name;
      const int owner = static_cast<int>(e.table);
      if (q.joins.empty() && owner == q.from) return e.name;
      if (auto it = alias.find(owner); it != alias.end()) return it->second + "." + e.name;
      return schema_.qualified_name(static_cast<std::size_t>(c));
    };
    auto agg = [&](const AggExpr& a) -> std::string {
      switch (a.agg) {
        case Agg::None: return col(a.column);
        case Agg::CountStar: return "count(*)";
        default: return std::string(agg_name(a.agg)) + "(" + col(a.column) + ")";
      }
    };
    auto table = [&](int t) { return entity(t).kind == EntityKind::Table ? entity(t).name : schema_.qualified_name(t); };

    std::string out = "select ";
    for (std::size_t i = 0; i < q.select.size(); ++i) {
      if (i) out += ", ";
      out += agg(q.select[i]);
    }
    out += " from " + table(q.from);
    if (!q.joins.empty()) out += " as t1";
    for (std::size_t i = 0; i < q.joins.size(); ++i) {
      const Join& j = q.joins[i];
      out += " join " + table(j.table) + " as t" + std::to_string(i + 2) + " on " + col(j.left) + " = " +
             col(j.right);
    }
    for (std::size_t i = 0; i < q.where.size(); ++i) {
      out += i == 0 ? " where " : (q.connectors[i - 1] == Connector::And ? " and " : " or ");
      const Cond& c = q.where[i];
      out += col(c.column);
      if (c.kind == CondKind::Compare) {
        out += " " + std::string(cmp_text(c.cmp)) + " " + next_value(false);
      } else {
        out += c.kind == CondKind::In ? " in (" : " not in (";
        out += query(*c.sub) + ")";
      }
    }
    if (q.group_by) {
      out += " group by " + col(q.group_by->column);
      if (q.group_by->having) {
        out += " having " + agg(q.group_by->having->expr) + " " + std::string(cmp_text(q.group_by->having->cmp)) +
               " " + next_value(false);
      }
    }
    if (q.order_by) {
      out += " order by " + agg(q.order_by->expr) + (q.order_by->descending ? " desc" : " asc");
    }
    if (q.limit) out += " limit " + next_value(true);
    return out;
  }

  const Schema& schema_;
  const RenderOptions& options_;
  std::size_t value_index_ = 0;
};

}  // namespace

Statement parse_statement(std::string_view text, const Schema& schema) {
  return Parser(text, schema).statement();
}

SqlAst parse_sql(std::string_view text, const Schema& schema) { return to_ast(parse_statement(text, schema)); }

std::string render_statement(const Statement& stmt, const Schema& schema, const RenderOptions& options) {
  return Renderer(schema, options).statement(stmt);
}

std::string render_sql(const SqlAst& ast, const Schema& schema, const RenderOptions& options) {
  return render_statement(statement_from_ast(ast), schema, options);
}

}  // namespace linkgate::sql
