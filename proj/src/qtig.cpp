#include "ao/qtig.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace ao {
namespace {

Token sentinel_features(const std::string& text) {
  Token t;
  t.text = text;
  t.pos = Pos::other;
  t.ner = Ner::none;
  t.is_stop = false;
  t.char_len = utf8_length(text);
  return t;
}

}  // namespace

std::size_t InteractionGraph::node_id(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw DataError("unknown interaction node: " + key);
  return it->second;
}

std::size_t InteractionGraph::add_or_get_node(const std::string& key,
                                              const Token& features) {
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  std::size_t id = nodes.size();
  nodes.push_back(InteractionNode{key, features, id});
  index_.emplace(key, id);
  return id;
}

bool InteractionGraph::pair_connected(std::size_t a, std::size_t b) const {
  return connected_.count({std::min(a, b), std::max(a, b)}) > 0;
}

void InteractionGraph::add_bidirectional(std::size_t a, std::size_t b,
                                         const std::string& family) {
  if (a == b) return;
  if (!connected_.insert({std::min(a, b), std::max(a, b)}).second) return;
  edges.push_back(InteractionEdge{a, b, family + "_fwd"});
  edges.push_back(InteractionEdge{b, a, family + "_bwd"});
}

InteractionGraph build_qtig(const std::vector<AnnotatedText>& queries,
                            const std::vector<AnnotatedText>& titles) {
  if (queries.empty() && titles.empty()) {
    throw DataError("interaction graph requires at least one input text");
  }

  InteractionGraph g;
  std::size_t sos = g.add_or_get_node(kSosToken, sentinel_features(kSosToken));
  std::size_t eos = g.add_or_get_node(kEosToken, sentinel_features(kEosToken));
  g.n_query_inputs = queries.size();

  std::vector<const AnnotatedText*> ordered;
  for (const auto& q : queries) ordered.push_back(&q);
  for (const auto& t : titles) ordered.push_back(&t);

  // Node merging and seq edges over every input first.
  for (const AnnotatedText* at : ordered) {
    std::vector<std::size_t> ids;
    ids.reserve(at->tokens.size());
    for (const auto& tok : at->tokens) {
      ids.push_back(g.add_or_get_node(tok.text, tok));
    }
    std::size_t prev = sos;
    for (std::size_t id : ids) {
      g.add_bidirectional(prev, id, "seq");
      prev = id;
    }
    g.add_bidirectional(prev, eos, "seq");
    g.inputs.push_back(std::move(ids));
  }

  // Dependency edges second; a pair already holding a seq edge keeps it.
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const AnnotatedText* at = ordered[i];
    const std::vector<std::size_t>& ids = g.inputs[i];
    for (const auto& arc : at->deps) {
      std::size_t dep = ids[arc.dependent];
      std::size_t head = ids[arc.head];
      g.add_bidirectional(dep, head, "dep_" + arc.label);
    }
  }
  return g;
}

DecodingGraph build_decoding_graph(const InteractionGraph& graph,
                                   const std::set<std::string>& positive) {
  if (positive.empty()) throw DataError("decoding requires at least one positive node");
  std::vector<std::size_t> pos_ids;
  for (const auto& key : positive) {
    if (!graph.has_node(key)) throw DataError("positive node absent from graph: " + key);
    std::size_t id = graph.node_id(key);
    if (id <= 1) throw DataError("sentinel cannot be a positive node: " + key);
    pos_ids.push_back(id);
  }
  std::sort(pos_ids.begin(), pos_ids.end());

  std::size_t n = graph.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);

  // Seq edges only, first-construction direction only, sentinels detached.
  for (const auto& e : graph.edges) {
    if (e.relation != "seq_fwd") continue;
    if (e.src <= 1 || e.dst <= 1) continue;
    adj[e.src].push_back(e.dst);
  }

  // Route endpoints: sos feeds the first positive of each input, the last
  // positive of each input feeds eos.
  std::set<std::size_t> is_positive(pos_ids.begin(), pos_ids.end());
  for (const auto& input : graph.inputs) {
    std::size_t first = n, last = n;
    for (std::size_t id : input) {
      if (is_positive.count(id) > 0) {
        if (first == n) first = id;
        last = id;
      }
    }
    if (first != n) {
      adj[0].push_back(first);
      adj[last].push_back(1);
    }
  }

  DecodingGraph dg;
  dg.order.push_back(0);
  for (std::size_t id : pos_ids) dg.order.push_back(id);
  dg.order.push_back(1);
  for (std::size_t id : dg.order) dg.keys.push_back(graph.nodes[id].token_text);

  std::size_t m = dg.order.size();
  std::vector<std::size_t> slot(n, n);
  for (std::size_t k = 0; k < m; ++k) slot[dg.order[k]] = k;

  dg.dist.assign(m, std::vector<int>(m, -1));
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t source = dg.order[k];
    std::vector<int> d(n, -1);
    std::deque<std::size_t> frontier{source};
    d[source] = 0;
    while (!frontier.empty()) {
      std::size_t v = frontier.front();
      frontier.pop_front();
      for (std::size_t w : adj[v]) {
        if (d[w] == -1) {
          d[w] = d[v] + 1;
          frontier.push_back(w);
        }
      }
    }
    for (std::size_t j = 0; j < m; ++j) dg.dist[k][j] = d[dg.order[j]];
  }
  return dg;
}

std::string dump_qtig_dot(const InteractionGraph& graph) {
  std::ostringstream out;
  out << "digraph qtig {\n";
  for (const auto& node : graph.nodes) {
    out << "  n" << node.seq_id << " [label=\"" << node.token_text << " #"
        << node.seq_id << "\"];\n";
  }
  for (const auto& e : graph.edges) {
    out << "  n" << e.src << " -> n" << e.dst << " [label=\"" << e.relation
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace ao
