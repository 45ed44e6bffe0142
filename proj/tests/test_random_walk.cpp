#include <doctest.h>

#include <cmath>

#include "ao/random_walk.hpp"
#include "support/oracles.hpp"

using namespace ao;

TEST_CASE("walk probabilities match the dense oracle on seeded graphs") {
  // [DERIVED] Independent dense-matrix power iteration with identical restart
  // and dangling-to-seed handling.
  WalkParams params;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ClickGraph g = oracle::random_click_graph(seed, 6, 5);
    TransitionModel m = transport_probabilities(g);
    std::vector<double> got = walk_visit_probabilities(g, m, "q0", params);
    std::vector<double> want = oracle::walk_probabilities(
        g, "q0", params.restart_probability, params.max_iterations,
        params.convergence_epsilon);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      INFO("seed ", seed, " node ", i);
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("walk probabilities sum to one") {
  WalkParams params;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ClickGraph g = oracle::random_click_graph(seed, 7, 4);
    TransitionModel m = transport_probabilities(g);
    std::vector<double> p = walk_visit_probabilities(g, m, "q1", params);
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("walk is deterministic") {
  WalkParams params;
  ClickGraph g = oracle::random_click_graph(3, 6, 5);
  TransitionModel m = transport_probabilities(g);
  std::vector<double> a = walk_visit_probabilities(g, m, "q2", params);
  std::vector<double> b = walk_visit_probabilities(g, m, "q2", params);
  CHECK(a == b);
}

TEST_CASE("raising the visit threshold never grows the cluster") {
  // delta_v monotonicity: member sets shrink (weakly) as the threshold rises.
  WalkParams base;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    ClickGraph g = oracle::random_click_graph(seed, 8, 6);
    TransitionModel m = transport_probabilities(g);
    std::size_t prev_size = SIZE_MAX;
    for (double threshold : {0.0001, 0.001, 0.01, 0.05, 0.2}) {
      WalkParams params = base;
      params.visit_threshold = threshold;
      QueryDocCluster c = random_walk_cluster(g, m, "q0", params);
      std::size_t size = c.queries.size() + c.docs.size();
      INFO("seed ", seed, " threshold ", threshold);
      CHECK(size <= prev_size);
      prev_size = size;
    }
  }
}

TEST_CASE("seed query always stays in its cluster") {
  WalkParams params;
  params.visit_threshold = 0.9;  // deliberately above any stationary mass
  ClickGraph g = oracle::random_click_graph(2, 6, 5);
  TransitionModel m = transport_probabilities(g);
  QueryDocCluster c = random_walk_cluster(g, m, "q3", params);
  REQUIRE(!c.queries.empty());
  CHECK(c.queries.front().first == "q3");
}

TEST_CASE("cluster members are sorted by probability then id") {
  WalkParams params;
  ClickGraph g = oracle::random_click_graph(5, 8, 6);
  TransitionModel m = transport_probabilities(g);
  QueryDocCluster c = random_walk_cluster(g, m, "q0", params);
  for (std::size_t i = 1; i < c.queries.size(); ++i) {
    bool ordered = c.queries[i - 1].second > c.queries[i].second ||
                   (c.queries[i - 1].second == c.queries[i].second &&
                    c.queries[i - 1].first < c.queries[i].first);
    CHECK(ordered);
  }
  for (std::size_t i = 1; i < c.docs.size(); ++i) {
    bool ordered = c.docs[i - 1].second > c.docs[i].second ||
                   (c.docs[i - 1].second == c.docs[i].second &&
                    c.docs[i - 1].first < c.docs[i].first);
    CHECK(ordered);
  }
}

TEST_CASE("vocabulary keep rule drops queries without majority overlap") {
  // Two topical queries share words; an off-topic query connected through a
  // shared doc must be dropped by the accumulated-vocabulary rule.
  ClickGraph g;
  g.add_query({"q1", "jackie chan movies", std::nullopt});
  g.add_query({"q2", "jackie chan films", std::nullopt});
  g.add_query({"q3", "weather tomorrow paris", std::nullopt});
  g.add_doc({"d1", "t1", std::nullopt, std::nullopt, std::nullopt});
  g.add_click("q1", "d1", 5);
  g.add_click("q2", "d1", 5);
  g.add_click("q3", "d1", 5);
  TransitionModel m = transport_probabilities(g);
  WalkParams params;
  params.visit_threshold = 0.0;
  QueryDocCluster c = random_walk_cluster(g, m, "q1", params);
  bool has_q2 = false, has_q3 = false;
  for (const auto& [id, p] : c.queries) {
    if (id == "q2") has_q2 = true;
    if (id == "q3") has_q3 = true;
  }
  CHECK(has_q2);        // shares 2 of its 3 words with the seed vocabulary
  CHECK_FALSE(has_q3);  // shares nothing
}

TEST_CASE("queries with only stop words pass vacuously") {
  ClickGraph g;
  g.add_query({"q1", "jackie chan", std::nullopt});
  g.add_query({"q2", "the of", std::nullopt});
  g.add_doc({"d1", "t1", std::nullopt, std::nullopt, std::nullopt});
  g.add_click("q1", "d1", 5);
  g.add_click("q2", "d1", 5);
  TransitionModel m = transport_probabilities(g);
  WalkParams params;
  params.visit_threshold = 0.0;
  Stoplist stops;
  stops.add("the");
  stops.add("of");
  QueryDocCluster c = random_walk_cluster(g, m, "q1", params, &stops);
  bool has_q2 = false;
  for (const auto& [id, p] : c.queries) {
    if (id == "q2") has_q2 = true;
  }
  CHECK(has_q2);
}

TEST_CASE("walk params validation rejects degenerate values") {
  WalkParams p;
  p.restart_probability = 0.0;
  CHECK_THROWS_AS(p.validate(), DataError);
  p = WalkParams{};
  p.restart_probability = 1.0;
  CHECK_THROWS_AS(p.validate(), DataError);
  p = WalkParams{};
  p.max_iterations = 0;
  CHECK_THROWS_AS(p.validate(), DataError);
  p = WalkParams{};
  p.overlap_fraction = 1.5;
  CHECK_THROWS_AS(p.validate(), DataError);
}

TEST_CASE("unknown seed raises") {
  ClickGraph g = oracle::random_click_graph(1, 3, 3);
  TransitionModel m = transport_probabilities(g);
  CHECK_THROWS_AS(walk_visit_probabilities(g, m, "nope", WalkParams{}), DataError);
}
