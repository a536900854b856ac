#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "prodkg/corpus.hpp"
#include "prodkg/corpus_io.hpp"
#include "test_util.hpp"

using namespace prodkg;

static const char* kTaxonomy =
    R"({"id":"root","name":"products","parent":null}
{"id":"drink","name":"drink","parent":"root"}
{"id":"coffee","name":"coffee","parent":"drink"}
)";

static const char* kProducts =
    R"({"id":"p1","types":["coffee"],"title":"bold roast coffee 12 oz","values":{"flavor":["bold roast"]},"popularity":3.5}
{"id":"p2","types":["coffee"],"title":"mellow blend coffee 6 oz","description":"smooth","bullets":["fresh"],"values":{"flavor":["mellow blend"]}}
{"id":"p3","types":["drink"],"title":"citrus fizz drink 1 l","values":{"flavor":["citrus fizz"],"brand":["fizzco"]}}
)";

TEST_CASE("load_catalog links products and taxonomy") {
  testutil::TempDir dir("corpus");
  testutil::write_file(dir.path / "taxonomy.jsonl", kTaxonomy);
  testutil::write_file(dir.path / "products.jsonl", kProducts);
  Catalog c = load_catalog(dir.path);
  CHECK(c.products.size() == 3);
  CHECK(c.taxonomy.nodes.size() == 3);
  CHECK(c.find("p2")->description == "smooth");
  CHECK(c.find("p1")->values.at("flavor") == std::vector<std::string>{"bold roast"});
  CHECK(c.find("p2")->popularity == 1.0);  // default when absent
  CHECK(c.attributes() == std::set<AttrId>{"brand", "flavor"});
}

TEST_CASE("empty products file with 1-node taxonomy") {
  testutil::TempDir dir("corpus");
  testutil::write_file(dir.path / "taxonomy.jsonl", R"({"id":"root","name":"all","parent":null})"
                                                    "\n");
  testutil::write_file(dir.path / "products.jsonl", "");
  Catalog c = load_catalog(dir.path);
  CHECK(c.products.empty());
  CHECK(c.taxonomy.nodes.size() == 1);
}

TEST_CASE("dangling type reference is an error naming the type") {
  testutil::TempDir dir("corpus");
  testutil::write_file(dir.path / "taxonomy.jsonl", R"({"id":"root","name":"all","parent":null})"
                                                    "\n");
  testutil::write_file(dir.path / "products.jsonl",
                       R"({"id":"p1","types":["tX"],"title":"x"})"
                       "\n");
  CHECK_THROWS_WITH_AS(load_catalog(dir.path), doctest::Contains("tX"), Error);
}

TEST_CASE("duplicate product id is an error") {
  testutil::TempDir dir("corpus");
  testutil::write_file(dir.path / "taxonomy.jsonl", R"({"id":"root","name":"all","parent":null})"
                                                    "\n");
  testutil::write_file(dir.path / "products.jsonl",
                       R"({"id":"p1","title":"a"})"
                       "\n"
                       R"({"id":"p1","title":"b"})"
                       "\n");
  CHECK_THROWS_WITH_AS(load_catalog(dir.path), doctest::Contains("duplicate"), Error);
}

TEST_CASE("parse error carries the line number") {
  testutil::TempDir dir("corpus");
  testutil::write_file(dir.path / "taxonomy.jsonl",
                       R"({"id":"root","name":"all","parent":null})"
                       "\n{broken\n");
  testutil::write_file(dir.path / "products.jsonl", "");
  CHECK_THROWS_WITH_AS(load_catalog(dir.path), doctest::Contains(":2:"), Error);
}

TEST_CASE("save/load round-trip is structurally identical") {
  testutil::TempDir dir("corpus");
  testutil::write_file(dir.path / "taxonomy.jsonl", kTaxonomy);
  testutil::write_file(dir.path / "products.jsonl", kProducts);
  Catalog a = load_catalog(dir.path);

  testutil::TempDir dir2("corpus_rt");
  save_catalog(a, dir2.path);
  Catalog b = load_catalog(dir2.path);
  REQUIRE(b.products.size() == a.products.size());
  for (size_t i = 0; i < a.products.size(); ++i) {
    CHECK(b.products[i].id == a.products[i].id);
    CHECK(b.products[i].title == a.products[i].title);
    CHECK(b.products[i].types == a.products[i].types);
    CHECK(b.products[i].values == a.products[i].values);
    CHECK(b.products[i].bullets == a.products[i].bullets);
    CHECK(b.products[i].popularity == a.products[i].popularity);
  }
  CHECK(b.taxonomy.nodes.size() == a.taxonomy.nodes.size());
  CHECK(b.taxonomy.edges() == a.taxonomy.edges());

  // saving twice is byte-identical
  testutil::TempDir dir3("corpus_rt2");
  save_catalog(b, dir3.path);
  CHECK(testutil::read_file(dir2.path / "products.jsonl") ==
        testutil::read_file(dir3.path / "products.jsonl"));
}

TEST_CASE("ancestors") {
  Taxonomy t;
  t.root = "root";
  t.nodes["root"] = {"root", "products", std::nullopt};
  t.nodes["drink"] = {"drink", "drink", "root"};
  t.nodes["coffee"] = {"coffee", "coffee", "drink"};

  CHECK(t.ancestors("root").empty());
  CHECK(t.ancestors("coffee") == std::vector<TypeId>{"drink", "root"});
  CHECK_THROWS_AS(t.ancestors("nope"), Error);

  SUBCASE("random tree matches naive parent-chasing oracle") {
    std::mt19937_64 rng(5);
    Taxonomy rt;
    rt.root = "n0";
    rt.nodes["n0"] = {"n0", "n0", std::nullopt};
    std::vector<TypeId> ids{"n0"};
    for (int i = 1; i < 40; ++i) {
      TypeId id = "n" + std::to_string(i);
      TypeId parent = ids[rng() % ids.size()];
      rt.nodes[id] = {id, id, parent};
      ids.push_back(id);
    }
    for (const auto& id : ids) {
      // naive oracle: chase parents one at a time
      std::vector<TypeId> expect;
      TypeId cur = id;
      while (rt.nodes.at(cur).parent) {
        cur = *rt.nodes.at(cur).parent;
        expect.push_back(cur);
      }
      auto got = rt.ancestors(id);
      CHECK(got == expect);
      CHECK(got.size() == rt.depth(id));
      // every consecutive pair is an edge
      TypeId child = id;
      for (const auto& a : got) {
        CHECK(*rt.nodes.at(child).parent == a);
        child = a;
      }
    }
  }
}

TEST_CASE("validate_catalog") {
  testutil::TempDir dir("corpus");
  testutil::write_file(dir.path / "taxonomy.jsonl", kTaxonomy);
  testutil::write_file(dir.path / "products.jsonl", kProducts);
  Catalog c = load_catalog(dir.path);
  CHECK(validate_catalog(c).empty());

  SUBCASE("2-cycle reported") {
    Catalog bad = c;
    bad.taxonomy.nodes["a"] = {"a", "a", "b"};
    bad.taxonomy.nodes["b"] = {"b", "b", "a"};
    auto report = validate_catalog(bad);
    bool has_cycle = false;
    for (const auto& v : report) has_cycle |= v.kind == "cycle";
    CHECK(has_cycle);
  }

  SUBCASE("empty title reported") {
    Catalog bad = c;
    bad.products[0].title = "";
    auto report = validate_catalog(bad);
    REQUIRE(report.size() == 1);
    CHECK(report[0].kind == "title");
    CHECK(report[0].subject == "p1");
  }

  SUBCASE("pure: identical reports on repeated calls") {
    Catalog bad = c;
    bad.products[1].types.insert("ghost");
    auto r1 = validate_catalog(bad);
    auto r2 = validate_catalog(bad);
    REQUIRE(r1.size() == r2.size());
    for (size_t i = 0; i < r1.size(); ++i) {
      CHECK(r1[i].kind == r2[i].kind);
      CHECK(r1[i].message == r2[i].message);
    }
  }
}

TEST_CASE("behavior logs round-trip") {
  BehaviorLogs logs;
  logs.queries.push_back({"q1", "bold roast coffee", {"p1"}});
  logs.coviews.push_back({"p1", "p2", 3});
  logs.reviews["p1"] = {"love this bold roast", "arrived on time"};

  testutil::TempDir dir("logs");
  save_logs(logs, dir.path);
  BehaviorLogs back = load_logs(dir.path);
  CHECK(back.queries.size() == 1);
  CHECK(back.queries[0].purchased == std::vector<ProductId>{"p1"});
  REQUIRE(back.coviews.size() == 1);
  CHECK(back.coviews[0].a == "p1");
  CHECK(back.coviews[0].count == 3);
  CHECK(back.reviews.at("p1").size() == 2);
}
