#include <doctest.h>

#include <map>
#include <set>

#include "ao/qtig.hpp"

using namespace ao;

namespace {

Token tok(const std::string& text) {
  return Token{text, Pos::noun, Ner::none, false, utf8_length(text)};
}

AnnotatedText plain(const std::vector<std::string>& words) {
  AnnotatedText at;
  for (const auto& w : words) at.tokens.push_back(tok(w));
  return at;
}

std::set<std::pair<std::size_t, std::size_t>> unordered_pairs(
    const InteractionGraph& g) {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : g.edges) {
    pairs.insert({std::min(e.src, e.dst), std::max(e.src, e.dst)});
  }
  return pairs;
}

bool has_edge(const InteractionGraph& g, std::size_t src, std::size_t dst,
              const std::string& relation) {
  for (const auto& e : g.edges) {
    if (e.src == src && e.dst == dst && e.relation == relation) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("hand fixture: query [a b] and title [b a] give five pairs") {
  // [PAPER] Shared token nodes plus bi-directional relation pairs; the
  // reversed title adds exactly the two pairs the query did not cover.
  InteractionGraph g = build_qtig({plain({"a", "b"})}, {plain({"b", "a"})});

  REQUIRE(g.nodes.size() == 4);
  CHECK(g.nodes[0].token_text == kSosToken);
  CHECK(g.nodes[1].token_text == kEosToken);
  CHECK(g.nodes[2].token_text == "a");
  CHECK(g.nodes[3].token_text == "b");
  for (std::size_t i = 0; i < g.nodes.size(); ++i) CHECK(g.nodes[i].seq_id == i);

  CHECK(unordered_pairs(g).size() == 5);
  CHECK(g.edges.size() == 10);

  CHECK(has_edge(g, 0, 2, "seq_fwd"));
  CHECK(has_edge(g, 2, 0, "seq_bwd"));
  CHECK(has_edge(g, 2, 3, "seq_fwd"));
  CHECK(has_edge(g, 3, 2, "seq_bwd"));
  CHECK(has_edge(g, 3, 1, "seq_fwd"));
  CHECK(has_edge(g, 1, 3, "seq_bwd"));
  CHECK(has_edge(g, 0, 3, "seq_fwd"));
  CHECK(has_edge(g, 3, 0, "seq_bwd"));
  CHECK(has_edge(g, 2, 1, "seq_fwd"));
  CHECK(has_edge(g, 1, 2, "seq_bwd"));

  REQUIRE(g.inputs.size() == 2);
  CHECK(g.inputs[0] == std::vector<std::size_t>{2, 3});
  CHECK(g.inputs[1] == std::vector<std::size_t>{3, 2});
  CHECK(g.n_query_inputs == 1);
}

TEST_CASE("repeated token within one input keeps a single node") {
  InteractionGraph g = build_qtig({plain({"a", "b", "a"})}, {});
  REQUIRE(g.nodes.size() == 4);
  // Pairs: {sos,a}, {a,b}, {b,a} already joined, so {a,eos} from the final a.
  // The b->a step adds nothing because {a,b} is taken.
  CHECK(unordered_pairs(g).size() == 3);
}

TEST_CASE("dependency edges land only on free pairs") {
  AnnotatedText q = plain({"c", "d", "e"});
  q.deps.push_back(DepArc{2, 0, "mod"});  // c -> e, pair untouched by seq
  q.deps.push_back(DepArc{1, 0, "amod"});  // c -> d, pair taken by seq
  InteractionGraph g = build_qtig({q}, {});
  std::size_t c = g.node_id("c"), d = g.node_id("d"), e = g.node_id("e");
  CHECK(has_edge(g, c, e, "dep_mod_fwd"));
  CHECK(has_edge(g, e, c, "dep_mod_bwd"));
  CHECK_FALSE(has_edge(g, c, d, "dep_amod_fwd"));
  CHECK(has_edge(g, c, d, "seq_fwd"));
}

TEST_CASE("edge pair uniqueness holds on random corpora") {
  // Property: at most one fwd/bwd pair of edges per unordered node pair and
  // never a self loop.
  Rng rng(99);
  std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g", "h"};
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<AnnotatedText> queries, titles;
    std::size_t nq = 1 + rng.below(3), nt = rng.below(3);
    for (std::size_t i = 0; i < nq + nt; ++i) {
      std::vector<std::string> words;
      std::size_t len = 1 + rng.below(6);
      for (std::size_t j = 0; j < len; ++j) {
        words.push_back(vocab[rng.below(vocab.size())]);
      }
      AnnotatedText at = plain(words);
      if (len >= 2 && rng.below(2) == 0) {
        std::size_t dep = rng.below(len), head = rng.below(len);
        if (dep != head) at.deps.push_back(DepArc{head, dep, "mod"});
      }
      if (i < nq) {
        queries.push_back(std::move(at));
      } else {
        titles.push_back(std::move(at));
      }
    }
    InteractionGraph g = build_qtig(queries, titles);
    std::map<std::pair<std::size_t, std::size_t>, int> count;
    for (const auto& e : g.edges) {
      CHECK(e.src != e.dst);
      count[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += 1;
    }
    for (const auto& [pair, c] : count) {
      INFO("iter ", iter, " pair ", pair.first, ",", pair.second);
      CHECK(c == 2);
    }
  }
}

TEST_CASE("decoding graph on the hand fixture") {
  InteractionGraph g = build_qtig({plain({"a", "b"})}, {plain({"b", "a"})});
  DecodingGraph dg = build_decoding_graph(g, {"a", "b"});

  REQUIRE(dg.order == std::vector<std::size_t>{0, 2, 3, 1});
  REQUIRE(dg.keys == std::vector<std::string>{kSosToken, "a", "b", kEosToken});
  // Forward seq edge a->b survives; b->a was never constructed, so b reaches
  // a only through nothing: -1.
  std::vector<std::vector<int>> want{
      {0, 1, 1, 2},
      {-1, 0, 1, 1},
      {-1, -1, 0, 1},
      {-1, -1, -1, 0},
  };
  CHECK(dg.dist == want);
}

TEST_CASE("decoding rejects sentinels and unknown positives") {
  InteractionGraph g = build_qtig({plain({"a", "b"})}, {});
  CHECK_THROWS_AS(build_decoding_graph(g, {}), DataError);
  CHECK_THROWS_AS(build_decoding_graph(g, {"zz"}), DataError);
  CHECK_THROWS_AS(build_decoding_graph(g, {kSosToken}), DataError);
}

TEST_CASE("decoding marks nodes without a forward route unreachable") {
  // Two inputs with no shared tokens: positives from different inputs cannot
  // reach each other.
  InteractionGraph g = build_qtig({plain({"a"}), plain({"b"})}, {});
  DecodingGraph dg = build_decoding_graph(g, {"a", "b"});
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k < dg.keys.size(); ++k) {
    if (dg.keys[k] == "a") ia = k;
    if (dg.keys[k] == "b") ib = k;
  }
  CHECK(dg.dist[ia][ib] == -1);
  CHECK(dg.dist[ib][ia] == -1);
}

TEST_CASE("dot dump names every node") {
  InteractionGraph g = build_qtig({plain({"a", "b"})}, {});
  std::string dot = dump_qtig_dot(g);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("a") != std::string::npos);
}
