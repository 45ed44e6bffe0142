// Query-title interaction graph: token-merged multigraph over the annotated
// inputs of one cluster, plus the modified graph used for route decoding.
#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ao/annotate.hpp"

namespace ao {

inline constexpr const char* kSosToken = "<sos>";
inline constexpr const char* kEosToken = "<eos>";

struct InteractionNode {
  std::string token_text;  // unique key, merged across inputs
  Token features;          // first-occurrence feature bundle
  std::size_t seq_id = 0;  // dense insertion order; sos=0, eos=1
};

// Directed edge. Bi-directional relations appear as one fwd/bwd pair sharing
// an unordered node pair; relation strings are "seq_fwd", "seq_bwd",
// "dep_<label>_fwd", "dep_<label>_bwd" (dep fwd runs dependent -> head).
struct InteractionEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::string relation;
};

struct InteractionGraph {
  std::vector<InteractionNode> nodes;  // indexed by seq_id
  std::vector<InteractionEdge> edges;
  // Source token sequences as node ids, sentinels excluded; queries first,
  // then titles, in the caller's (cluster weight) order.
  std::vector<std::vector<std::size_t>> inputs;
  std::size_t n_query_inputs = 0;

  bool has_node(const std::string& key) const { return index_.count(key) > 0; }
  std::size_t node_id(const std::string& key) const;
  std::size_t add_or_get_node(const std::string& key, const Token& features);

  // True if some edge already joins the unordered pair {a, b}.
  bool pair_connected(std::size_t a, std::size_t b) const;
  // Adds relation fwd a->b and bwd b->a unless the pair is already connected
  // or a == b.
  void add_bidirectional(std::size_t a, std::size_t b, const std::string& family);

private:
  std::unordered_map<std::string, std::size_t> index_;
  std::set<std::pair<std::size_t, std::size_t>> connected_;
};

// Sentinels first (seq ids 0 and 1), then every input wrapped as
// sos..tokens..eos; all seq edges added in one pass over the inputs, then all
// dependency edges; an edge lands only if its unordered pair is still free.
InteractionGraph build_qtig(const std::vector<AnnotatedText>& queries,
                            const std::vector<AnnotatedText>& titles);

// Modified graph for route decoding over the chosen positive nodes:
// dependency edges dropped, seq edges kept only in their first-construction
// direction, sentinel edges replaced by sos -> first positive and last
// positive -> eos per input. dist holds unit shortest-path lengths between
// the ordered nodes [sos, positives by seq_id, eos]; -1 marks unreachable.
struct DecodingGraph {
  std::vector<std::size_t> order;  // node ids
  std::vector<std::string> keys;   // token texts parallel to order
  std::vector<std::vector<int>> dist;
};

DecodingGraph build_decoding_graph(const InteractionGraph& graph,
                                   const std::set<std::string>& positive);

// Graphviz text dump for visualization tooling.
std::string dump_qtig_dot(const InteractionGraph& graph);

}  // namespace ao
