#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ao/click_graph.hpp"
#include "support/oracles.hpp"

using namespace ao;

namespace {

std::string temp_path(const char* name) {
  return std::string("ao_test_") + name + ".jsonl";
}

ClickGraph tiny_graph() {
  ClickGraph g;
  g.add_query({"q1", "jackie chan movies", std::nullopt});
  g.add_query({"q2", "jackie chan age", std::nullopt});
  g.add_doc({"d1", "the best jackie chan movies", std::nullopt, "film", 100});
  g.add_doc({"d2", "jackie chan biography", std::nullopt, "people", 200});
  g.add_click("q1", "d1", 3);
  g.add_click("q1", "d2", 1);
  g.add_click("q2", "d2", 2);
  return g;
}

}  // namespace

TEST_CASE("click graph merges duplicate edges by summing counts") {
  ClickGraph g = tiny_graph();
  g.add_click("q1", "d1", 2);
  REQUIRE(g.edges().size() == 3);
  bool found = false;
  for (const auto& e : g.edges()) {
    if (e.query_id == "q1" && e.doc_id == "d1") {
      CHECK(e.count == 5);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("first record fixes metadata, later ones only merge") {
  ClickGraph g;
  g.add_query({"q1", "original text", std::nullopt});
  g.add_query({"q1", "different text", std::nullopt});
  CHECK(g.query("q1").text == "original text");
  CHECK(g.query_count() == 1);
}

TEST_CASE("click on unknown endpoint raises") {
  ClickGraph g = tiny_graph();
  CHECK_THROWS_AS(g.add_click("missing", "d1", 1), DataError);
  CHECK_THROWS_AS(g.add_click("q1", "missing", 1), DataError);
  CHECK_THROWS_AS(g.add_click("q1", "d1", 0), DataError);
}

TEST_CASE("transport probabilities match the count ratios") {
  // [TRIVIAL] Hand ratios: q1 has counts 3 and 1, d2 has counts 1 and 2.
  ClickGraph g = tiny_graph();
  TransitionModel m = transport_probabilities(g);
  REQUIRE(m.p_doc_given_query.size() == 3);
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edges()[e];
    if (edge.query_id == "q1" && edge.doc_id == "d1") {
      CHECK(m.p_doc_given_query[e] == doctest::Approx(0.75));
      CHECK(m.p_query_given_doc[e] == doctest::Approx(1.0));
    }
    if (edge.query_id == "q1" && edge.doc_id == "d2") {
      CHECK(m.p_doc_given_query[e] == doctest::Approx(0.25));
      CHECK(m.p_query_given_doc[e] == doctest::Approx(1.0 / 3.0));
    }
    if (edge.query_id == "q2" && edge.doc_id == "d2") {
      CHECK(m.p_doc_given_query[e] == doctest::Approx(1.0));
      CHECK(m.p_query_given_doc[e] == doctest::Approx(2.0 / 3.0));
    }
  }
}

TEST_CASE("transport probability rows sum to one on random graphs") {
  // Property over seeded graphs: every node with at least one edge gets a
  // probability row summing to 1 within 1e-9.
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ClickGraph g = oracle::random_click_graph(seed, 8, 6);
    TransitionModel m = transport_probabilities(g);
    std::map<std::string, double> query_sum, doc_sum;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      query_sum[g.edges()[e].query_id] += m.p_doc_given_query[e];
      doc_sum[g.edges()[e].doc_id] += m.p_query_given_doc[e];
    }
    for (const auto& [id, sum] : query_sum) {
      INFO("seed ", seed, " query ", id);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (const auto& [id, sum] : doc_sum) {
      INFO("seed ", seed, " doc ", id);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("click log round trip preserves the graph") {
  ClickGraph g = tiny_graph();
  std::string path = temp_path("click_roundtrip");
  save_click_graph(g, path);
  ClickGraph loaded = load_click_log(path);
  REQUIRE(loaded.query_count() == g.query_count());
  REQUIRE(loaded.doc_count() == g.doc_count());
  REQUIRE(loaded.edges().size() == g.edges().size());
  for (const auto& e : g.edges()) {
    bool found = false;
    for (const auto& f : loaded.edges()) {
      if (f.query_id == e.query_id && f.doc_id == e.doc_id && f.count == e.count) {
        found = true;
      }
    }
    CHECK(found);
  }
  CHECK(loaded.doc("d1").category == "film");
  CHECK(loaded.doc("d2").publish_time == 200);
  std::remove(path.c_str());
}

TEST_CASE("malformed click log lines carry file and line context") {
  std::string path = temp_path("click_bad");
  {
    std::ofstream out(path);
    out << R"({"query": "a", "query_id": "q1", "doc_id": "d1", "title": "t", "click_count": 1})" << "\n";
    out << R"({"query": "b", "query_id": "q2"})" << "\n";
  }
  try {
    load_click_log(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("query click totals aggregate by normalized text") {
  ClickGraph g;
  g.add_query({"q1", "Jackie Chan", std::nullopt});
  g.add_query({"q2", "jackie chan", std::nullopt});
  g.add_doc({"d1", "t", std::nullopt, std::nullopt, std::nullopt});
  g.add_click("q1", "d1", 2);
  g.add_click("q2", "d1", 3);
  auto totals = g.query_click_totals();
  CHECK(totals.at("jackie chan") == 5);
}

TEST_CASE("find_query_by_text compares normalized") {
  ClickGraph g = tiny_graph();
  const QueryRecord* q = g.find_query_by_text("  Jackie   CHAN movies ");
  REQUIRE(q != nullptr);
  CHECK(q->id == "q1");
  CHECK(g.find_query_by_text("no such query") == nullptr);
}
