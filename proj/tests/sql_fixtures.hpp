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

#include <algorithm>

#include "linkgate/schema/schema.hpp"
#include "linkgate/sql/query.hpp"
#include "linkgate/tensor/random.hpp"

namespace linkgate::testing {

inline Schema world_schema() {
  return Schema::build("world", {{"continents", {{"contid", ColumnType::Number, true}, {"continent", ColumnType::Text, false}}},
                                 {"countries",
                                  {{"countryid", ColumnType::Number, true},
                                   {"countryname", ColumnType::Text, false},
                                   {"continent", ColumnType::Number, false}}}},
                       {{"countries", "continent", "continents", "contid"}});
}

inline Schema singer_schema() {
  return Schema::build("concert_singer",
                       {{"stadium", {{"stadium_id", ColumnType::Number, true}, {"name", ColumnType::Text, false},
                                     {"capacity", ColumnType::Number, false}}},
                        {"singer", {{"singer_id", ColumnType::Number, true}, {"name", ColumnType::Text, false},
                                    {"country", ColumnType::Text, false}, {"age", ColumnType::Number, false}}},
                        {"concert", {{"concert_id", ColumnType::Number, true}, {"stadium_id", ColumnType::Number, false},
                                     {"year", ColumnType::Time, false}}}},
                       {{"concert", "stadium_id", "stadium", "stadium_id"}});
}

inline Schema pets_schema() {
  return Schema::build("pets", {{"student", {{"stuid", ColumnType::Number, true}, {"lname", ColumnType::Text, false},
                                             {"fname", ColumnType::Text, false}, {"age", ColumnType::Number, false},
                                             {"sex", ColumnType::Text, false}}},
                                {"has_pet", {{"stuid", ColumnType::Number, false}, {"petid", ColumnType::Number, false}}},
                                {"pets", {{"petid", ColumnType::Number, true}, {"pettype", ColumnType::Text, false},
                                          {"pet_age", ColumnType::Number, false}}}},
                       {{"has_pet", "stuid", "student", "stuid"}, {"has_pet", "petid", "pets", "petid"}});
}

struct RandomQueryOptions {
  int max_select = 3;
  int max_joins = 2;
  int max_conds = 3;
  int max_depth = 1;  // nesting of IN subqueries
  bool allow_set_ops = true;
  bool allow_where = true;
  bool allow_tail = true;  // GROUP BY / ORDER BY / LIMIT
};

inline int random_column(Rng& rng, const Schema& s, const std::vector<int>& tables) {
  // Mostly columns of the FROM tables, sometimes any column.
  if (rng.bernoulli(0.85)) {
    const int t = tables[rng.index(tables.size())];
    const auto& cols = s.columns_of(static_cast<std::size_t>(t));
    return static_cast<int>(cols[rng.index(cols.size())]);
  }
  return static_cast<int>(s.table_count() + rng.index(s.column_count()));
}

inline sql::AggExpr random_agg(Rng& rng, const Schema& s, const std::vector<int>& tables) {
  const int k = static_cast<int>(rng.index(7));
  if (k == 1) return {sql::Agg::CountStar, -1};
  return {static_cast<sql::Agg>(k), random_column(rng, s, tables)};
}

inline sql::Query random_query(Rng& rng, const Schema& s, const RandomQueryOptions& o, int depth = 0) {
  using namespace sql;
  Query q;
  std::vector<int> pool;
  for (std::size_t t : s.tables()) pool.push_back(static_cast<int>(t));
  rng.shuffle(pool);
  const std::size_t joins =
      std::min<std::size_t>(rng.index(static_cast<std::size_t>(o.max_joins) + 1), pool.size() - 1);
  q.from = pool[0];
  std::vector<int> tables{q.from};
  for (std::size_t j = 0; j < joins; ++j) {
    const int t = pool[j + 1];
    tables.push_back(t);
    q.joins.push_back({t, random_column(rng, s, tables), random_column(rng, s, tables)});
  }
  const std::size_t nsel = 1 + rng.index(static_cast<std::size_t>(o.max_select));
  for (std::size_t i = 0; i < nsel; ++i) q.select.push_back(random_agg(rng, s, tables));
  if (o.allow_where && rng.bernoulli(0.5)) {
    const std::size_t nconds = 1 + rng.index(static_cast<std::size_t>(o.max_conds));
    for (std::size_t i = 0; i < nconds; ++i) {
      Cond c;
      c.column = random_column(rng, s, tables);
      if (depth < o.max_depth && rng.bernoulli(0.2)) {
        c.kind = rng.bernoulli(0.5) ? CondKind::In : CondKind::NotIn;
        RandomQueryOptions inner = o;
        inner.allow_set_ops = false;
        c.sub = std::make_shared<const Query>(random_query(rng, s, inner, depth + 1));
      } else {
        c.cmp = static_cast<Cmp>(rng.index(7));
      }
      if (i > 0) q.connectors.push_back(rng.bernoulli(0.7) ? Connector::And : Connector::Or);
      q.where.push_back(std::move(c));
    }
  }
  if (o.allow_tail) {
    if (rng.bernoulli(0.4)) {
      GroupBy g{random_column(rng, s, tables), std::nullopt};
      if (rng.bernoulli(0.4)) g.having = Having{random_agg(rng, s, tables), static_cast<Cmp>(rng.index(7))};
      q.group_by = g;
    }
    if (rng.bernoulli(0.4)) q.order_by = OrderBy{random_agg(rng, s, tables), rng.bernoulli(0.5)};
    q.limit = rng.bernoulli(0.3);
  }
  return q;
}

inline sql::Statement random_statement(Rng& rng, const Schema& s, const RandomQueryOptions& o = {}) {
  sql::Statement st;
  st.left = random_query(rng, s, o);
  if (o.allow_set_ops && rng.bernoulli(0.25)) {
    st.op = static_cast<sql::SetOp>(1 + rng.index(3));
    st.right = random_query(rng, s, o);
  }
  return st;
}

}  // namespace linkgate::testing
