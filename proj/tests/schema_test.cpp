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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "linkgate/error.hpp"
#include "linkgate/schema/linking.hpp"
#include "linkgate/schema/schema.hpp"
#include "linkgate/schema/text.hpp"

using namespace linkgate;

namespace {

const std::filesystem::path kData = LINKGATE_TEST_DATA_DIR;

Schema world() { return load_schema(kData / "world_small.json"); }

std::size_t id(const Schema& s, const std::string& qualified) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.qualified_name(i) == qualified) return i;
  }
  FAIL("no entity " << qualified);
  return 0;
}

bool has_link(const std::vector<StructuralLink>& links, std::size_t e, Relation r, int steps) {
  return std::find(links.begin(), links.end(), StructuralLink{e, r, steps}) != links.end();
}

// Plain recursive edit distance, used as an independent check.
std::size_t slow_edit(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    if (i == 0) return j;
    if (j == 0) return i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = std::min(go(i - 1, j) + 1, go(i, j - 1) + 1);
    best = std::min(best, go(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1));
    return memo[key] = best;
  };
  return go(a.size(), b.size());
}

}  // namespace

TEST_CASE("text helpers") {
  CHECK(tokenize_question("How many Countries, in 2020?") ==
        std::vector<std::string>{"how", "many", "countries", "in", "2020"});
  CHECK(split_name("Has_Pet") == std::vector<std::string>{"has", "pet"});
  CHECK(split_name("CountryName") == std::vector<std::string>{"country", "name"});
  CHECK(split_name("first name") == std::vector<std::string>{"first", "name"});
  CHECK(stem("countries") == "country");
  CHECK(stem("boxes") == "box");
  CHECK(stem("tables") == "table");
  CHECK(stem("class") == "class");
  CHECK(stem("singing") == "sing");
  CHECK(stem("created") == "creat");
  CHECK(stem("has") == "has");
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(normalized_levenshtein("", "") == 0.0);
  CHECK(normalized_levenshtein("abc", "") == 1.0);
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"countries", "continents"}, {"flight", "flights"}, {"", "x"}, {"abcdef", "fedcba"}}) {
    CHECK(levenshtein(a, b) == slow_edit(a, b));
  }
}

TEST_CASE("load world fixture: canonical order and edges") {
  const Schema s = world();
  REQUIRE(s.size() == 7);
  CHECK(s.table_count() == 2);
  CHECK(s.column_count() == 5);
  CHECK(s.entity(0).name == "continents");
  CHECK(s.entity(1).name == "countries");
  CHECK(s.qualified_name(2) == "continents.contid");
  CHECK(s.qualified_name(3) == "continents.continent");
  CHECK(s.qualified_name(4) == "countries.countryid");
  CHECK(s.qualified_name(6) == "countries.continent");
  CHECK(s.entity(2).is_primary_key);
  CHECK(s.entity(3).dtype == ColumnType::Text);
  for (const Entity& e : s.entities()) CHECK_FALSE(e.name_tokens.empty());

  const Edge fk{id(s, "countries.continent"), id(s, "continents.contid"), EdgeLabel::ForeignToPrimary};
  CHECK(std::find(s.edges().begin(), s.edges().end(), fk) != s.edges().end());
  const Edge pf{fk.target, fk.source, EdgeLabel::PrimaryToForeign};
  CHECK(std::find(s.edges().begin(), s.edges().end(), pf) != s.edges().end());
  CHECK(s.edges().size() == 2 * 5 + 2);

  for (const Edge& e : s.edges()) {
    switch (e.label) {
      case EdgeLabel::TableColumn:
        CHECK(s.is_table(e.source));
        CHECK_FALSE(s.is_table(e.target));
        break;
      case EdgeLabel::ColumnTable:
        CHECK_FALSE(s.is_table(e.source));
        CHECK(s.is_table(e.target));
        break;
      default:
        CHECK_FALSE(s.is_table(e.source));
        CHECK_FALSE(s.is_table(e.target));
    }
  }
}

TEST_CASE("loading is deterministic") {
  CHECK(world() == world());
}

TEST_CASE("single table with one column") {
  const Schema s = Schema::build("one", {{"t", {{"c", ColumnType::Text, false}}}}, {});
  CHECK(s.size() == 2);
  REQUIRE(s.edges().size() == 2);
  CHECK(s.edges()[0] == Edge{0, 1, EdgeLabel::TableColumn});
  CHECK(s.edges()[1] == Edge{1, 0, EdgeLabel::ColumnTable});
}

TEST_CASE("validation errors") {
  const TableSpec a{"a", {{"id", ColumnType::Number, true}}};
  const TableSpec b{"b", {{"id", ColumnType::Number, true}, {"a_id", ColumnType::Number, false}}};
  CHECK_THROWS_AS(Schema::build("x", {a, b}, {{"b", "a_id", "a", "missing"}}), LoadError);
  CHECK_THROWS_AS(Schema::build("x", {a, b}, {{"b", "a_id", "zzz", "id"}}), LoadError);
  CHECK_THROWS_AS(Schema::build("x", {a, b}, {{"a", "id", "b", "a_id"}}), LoadError);
  CHECK_THROWS_AS(Schema::build("x", {a, a}, {}), LoadError);
  CHECK_THROWS_AS(Schema::build("x", {{"t", {{"c", ColumnType::Text, false}, {"C", ColumnType::Text, false}}}},
                                {}),
                  LoadError);
  CHECK_THROWS_AS(Schema::build("x", {{"t", {}}}, {}), LoadError);
  CHECK_THROWS_AS(Schema::build("x", {}, {}), LoadError);
  CHECK_NOTHROW(Schema::build("x", {a, b}, {{"b", "a_id", "a", "id"}}));

  nlohmann::json bad = schema_to_json(world());
  bad["foreign_keys"][0]["to"] = "continents.nope";
  CHECK_THROWS_AS(schema_from_json(bad), LoadError);
  bad["foreign_keys"][0]["to"] = "nodot";
  CHECK_THROWS_AS(schema_from_json(bad), LoadError);
  CHECK_THROWS_AS(schema_from_json(nlohmann::json::object()), LoadError);
  CHECK_THROWS_AS(load_schema(kData / "does_not_exist.json"), LoadError);
}

TEST_CASE("native JSON round trip") {
  const Schema s = world();
  CHECK(schema_from_json(schema_to_json(s)) == s);
  const auto path = std::filesystem::temp_directory_path() / "linkgate_schema_rt.json";
  save_schema(path, s);
  CHECK(load_schema(path) == s);
  std::filesystem::remove(path);
}

TEST_CASE("spider import") {
  const auto path = kData / "spider_tables.json";
  std::ifstream in(path);
  const nlohmann::json file = nlohmann::json::parse(in);
  for (const auto& entry : file) {
    const std::string db = entry["db_id"];
    const Schema s = import_spider_tables(path, db);
    std::size_t columns = 0;
    for (const auto& c : entry["column_names_original"]) columns += c[0].get<int>() >= 0 ? 1 : 0;
    CHECK(s.size() == entry["table_names_original"].size() + columns);
    for (const Entity& e : s.entities()) CHECK(e.name != "*");
    CHECK(spider_entry_to_schema(schema_to_spider_entry(s)) == s);
  }
  const Schema pets = import_spider_tables(path, "pets_1");
  CHECK(pets.entity(0).name == "student");
  CHECK(pets.entity(1).name_tokens == std::vector<std::string>{"has", "pet"});
  REQUIRE(pets.foreign_keys().size() == 1);
  CHECK(pets.qualified_name(pets.foreign_keys()[0].first) == "has_pet.stuid");
  CHECK(pets.qualified_name(pets.foreign_keys()[0].second) == "student.stuid");

  CHECK(import_spider_tables(path, "world_small") == world());
  CHECK_THROWS_AS(import_spider_tables(path, "nope"), LookupError);
}

TEST_CASE("spider foreign key to undeclared key marks it primary") {
  nlohmann::json entry = schema_to_spider_entry(world());
  entry["primary_keys"] = nlohmann::json::array();
  const Schema s = spider_entry_to_schema(entry);
  CHECK(s.entity(id(s, "continents.contid")).is_primary_key);
  CHECK_FALSE(s.entity(id(s, "countries.countryid")).is_primary_key);
}

TEST_CASE("structural neighbors of continents.contid") {
  const Schema s = world();
  const std::size_t contid = id(s, "continents.contid");
  const auto links = structural_neighbors(s, contid);
  CHECK(has_link(links, contid, Relation::Self, 0));
  CHECK(has_link(links, id(s, "continents"), Relation::ColumnTable, 1));
  CHECK(has_link(links, id(s, "countries.continent"), Relation::PrimaryToForeign, 1));
  CHECK(has_link(links, id(s, "continents.continent"), Relation::Sibling, 2));
  CHECK(links.size() == 4);
}

TEST_CASE("structural neighbors: simple cases") {
  const Schema s = Schema::build(
      "x", {{"t", {{"a", ColumnType::Text, false}, {"b", ColumnType::Text, false}}}, {"u", {{"c", ColumnType::Text, false}}}},
      {});
  const auto table_links = structural_neighbors(s, 0);
  CHECK(table_links.size() == 3);
  for (const auto& l : table_links) {
    CHECK((l.relation == Relation::Self || l.relation == Relation::TableColumn));
  }
  const std::size_t c = id(s, "u.c");
  const auto lonely = structural_neighbors(s, c);
  CHECK(lonely.size() == 2);
  CHECK(has_link(lonely, c, Relation::Self, 0));
  CHECK(has_link(lonely, id(s, "u"), Relation::ColumnTable, 1));
  CHECK_THROWS_AS(structural_neighbors(s, 99), UsageError);
}

TEST_CASE("structural neighbors: key relations are symmetric") {
  for (const Schema& s : {world(), import_spider_tables(kData / "spider_tables.json", "pets_1")}) {
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (const auto& l : structural_neighbors(s, a)) {
        if (l.relation == Relation::ForeignToPrimary) {
          CHECK(has_link(structural_neighbors(s, l.entity), a, Relation::PrimaryToForeign, 1));
        }
        if (l.relation == Relation::PrimaryToForeign) {
          CHECK(has_link(structural_neighbors(s, l.entity), a, Relation::ForeignToPrimary, 1));
        }
      }
    }
  }
}

TEST_CASE("linking matrix: exact match dominates") {
  const Schema s = world();
  const std::vector<std::string> q = {"list", "all", "countries", "in", "europe"};
  const Tensor m = build_linking_matrix(q, s, nullptr);
  REQUIRE(m.shape() == Shape{5, 7});

  // Oracle row for "countries": default weights, no embeddings.
  std::vector<double> score(7);
  for (std::size_t j = 0; j < 7; ++j) {
    const Entity& e = s.entity(j);
    double best = 1.0;
    for (const auto& t : e.name_tokens) {
      best = std::min(best, double(slow_edit("countries", t)) / double(std::max(t.size(), std::size_t{9})));
    }
    score[j] = 1.0 - best;
  }
  score[1] += 5.0 + 2.0 + 2.0;  // table "countries": exact, partial, lemma
  double z = 0;
  for (double v : score) z += std::exp(v);
  std::size_t argmax = 0;
  for (std::size_t j = 0; j < 7; ++j) {
    CHECK(m.at(2, j) == doctest::Approx(std::exp(score[j]) / z).epsilon(1e-12));
    if (m.at(2, j) > m.at(2, argmax)) argmax = j;
  }
  CHECK(argmax == id(s, "countries"));
}

TEST_CASE("linking matrix: rows are distributions") {
  const Schema s = import_spider_tables(kData / "spider_tables.json", "pets_1");
  const WordEmbedder embed = [](const std::string& w) {
    std::vector<double> v(4);
    for (std::size_t i = 0; i < w.size(); ++i) v[i % 4] += double(w[i]) / 100.0 - 1.0;
    return v;
  };
  const std::vector<std::string> q = {"how", "many", "pets", "does", "each", "student", "have",
                                      "by", "first", "name"};
  const Tensor m = build_linking_matrix(q, s, embed);
  for (std::size_t i = 0; i < q.size(); ++i) {
    double sum = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      CHECK(m.at(i, j) >= 0.0);
      sum += m.at(i, j);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
  // "first name" spans two tokens; both positions see the exact match.
  const std::size_t fname = id(s, "student.fname");
  CHECK_FALSE(link_features(q, 8, s.entity(fname), nullptr).exact);
  const Schema spaced = Schema::build("x", {{"student", {{"first name", ColumnType::Text, false}}}}, {});
  CHECK(link_features(q, 8, spaced.entity(1), nullptr).exact);
  CHECK(link_features(q, 9, spaced.entity(1), nullptr).exact);
  CHECK_FALSE(link_features(q, 7, spaced.entity(1), nullptr).exact);
}

TEST_CASE("linking matrix: unknown token with zero embeddings is uniform") {
  const Schema s = world();
  const WordEmbedder zeros = [](const std::string&) { return std::vector<double>(3, 0.0); };
  LinkingWeights w;
  w.edit = 0.0;  // the edit feature would otherwise vary with name length
  const Tensor m = build_linking_matrix({"qqqqqqqqqqqq"}, s, zeros, w);
  for (std::size_t j = 0; j < s.size(); ++j) CHECK(m.at(0, j) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  const Tensor with_edit = build_linking_matrix({"qqqqqqqqqqqq"}, s, zeros);
  for (std::size_t j = 0; j < s.size(); ++j) CHECK(with_edit.at(0, j) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("linking matrix: raising the exact weight never lowers an exact match") {
  const Schema s = world();
  const std::vector<std::string> q = {"which", "continent", "has", "most", "countries"};
  double prev_cont = 0, prev_countries = 0;
  for (double w_exact : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
    LinkingWeights w;
    w.exact = w_exact;
    const Tensor m = build_linking_matrix(q, s, nullptr, w);
    const double cont = m.at(1, id(s, "continents.continent"));
    const double countries = m.at(4, id(s, "countries"));
    CHECK(cont >= prev_cont);
    CHECK(countries >= prev_countries);
    prev_cont = cont;
    prev_countries = countries;
  }
}

TEST_CASE("linking matrix: usage errors") {
  CHECK_THROWS_AS(build_linking_matrix({}, world(), nullptr), UsageError);
  LinkingWeights w;
  w.temperature = 0.0;
  CHECK_THROWS_AS(build_linking_matrix({"a"}, world(), nullptr, w), UsageError);
}
