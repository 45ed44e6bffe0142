#include "ao/random_walk.hpp"

#include <algorithm>
#include <cmath>

namespace ao {

void WalkParams::validate() const {
  if (!(restart_probability > 0.0 && restart_probability < 1.0)) {
    throw DataError("restart probability must lie in (0,1)");
  }
  if (max_iterations == 0) throw DataError("max_iterations must be positive");
  if (convergence_epsilon < 0.0) throw DataError("convergence epsilon must be nonnegative");
  if (visit_threshold < 0.0 || visit_threshold > 1.0) {
    throw DataError("visit threshold must lie in [0,1]");
  }
  if (overlap_fraction < 0.0 || overlap_fraction > 1.0) {
    throw DataError("overlap fraction must lie in [0,1]");
  }
}

std::vector<double> walk_visit_probabilities(const ClickGraph& graph,
                                             const TransitionModel& model,
                                             const std::string& seed_query_id,
                                             const WalkParams& params) {
  params.validate();
  std::size_t nq = graph.query_count();
  std::size_t nd = graph.doc_count();
  std::size_t n = nq + nd;
  std::size_t seed = graph.query_pos(seed_query_id);

  // Outgoing-degree flags: a node with no incident edges is dangling and its
  // mass returns to the seed each step.
  std::vector<bool> dangling(n, true);
  const auto& edges = graph.edges();
  std::vector<std::size_t> eq(edges.size()), ed(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    eq[e] = graph.query_pos(edges[e].query_id);
    ed[e] = nq + graph.doc_pos(edges[e].doc_id);
    dangling[eq[e]] = false;
    dangling[ed[e]] = false;
  }

  double alpha = params.restart_probability;
  std::vector<double> p(n, 0.0), next(n, 0.0);
  p[seed] = 1.0;

  for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    double returned = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (dangling[v]) returned += p[v];
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      next[ed[e]] += p[eq[e]] * model.p_doc_given_query[e];
      next[eq[e]] += p[ed[e]] * model.p_query_given_doc[e];
    }
    next[seed] += returned;
    double diff = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] = alpha * (v == seed ? 1.0 : 0.0) + (1.0 - alpha) * next[v];
      diff = std::max(diff, std::abs(next[v] - p[v]));
    }
    p.swap(next);
    if (diff < params.convergence_epsilon) break;
  }
  return p;
}

std::set<std::string> nonstop_words(const std::string& text, const Stoplist* stoplist) {
  std::set<std::string> out;
  for (const auto& tok : primitive_tokens(normalize_text(text))) {
    if (is_punct_char(tok)) continue;
    if (stoplist != nullptr && stoplist->contains(tok)) continue;
    out.insert(tok);
  }
  return out;
}

QueryDocCluster random_walk_cluster(const ClickGraph& graph,
                                    const TransitionModel& model,
                                    const std::string& seed_query_id,
                                    const WalkParams& params,
                                    const Stoplist* stoplist) {
  std::vector<double> p =
      walk_visit_probabilities(graph, model, seed_query_id, params);
  std::size_t nq = graph.query_count();
  std::size_t seed = graph.query_pos(seed_query_id);

  QueryDocCluster cluster;
  cluster.seed_query_id = seed_query_id;

  // Candidate queries above threshold, strongest first. The seed is kept
  // unconditionally, even when the threshold would drop it.
  std::vector<std::size_t> qc;
  for (std::size_t i = 0; i < nq; ++i) {
    if (i == seed) continue;
    if (p[i] > 0.0 && p[i] >= params.visit_threshold) qc.push_back(i);
  }
  auto by_weight = [&](std::size_t a, std::size_t b) {
    if (p[a] != p[b]) return p[a] > p[b];
    return graph.queries()[a].id < graph.queries()[b].id;
  };
  std::sort(qc.begin(), qc.end(), by_weight);

  std::set<std::string> vocab = nonstop_words(graph.queries()[seed].text, stoplist);
  cluster.queries.emplace_back(seed_query_id, p[seed]);
  for (std::size_t i : qc) {
    std::set<std::string> words = nonstop_words(graph.queries()[i].text, stoplist);
    bool keep = true;
    if (!words.empty()) {
      std::size_t shared = 0;
      for (const auto& w : words) shared += vocab.count(w);
      keep = static_cast<double>(shared) >
             params.overlap_fraction * static_cast<double>(words.size());
    }
    if (keep) {
      cluster.queries.emplace_back(graph.queries()[i].id, p[i]);
      vocab.insert(words.begin(), words.end());
    }
  }

  for (std::size_t j = 0; j < graph.doc_count(); ++j) {
    double w = p[nq + j];
    if (w > 0.0 && w >= params.visit_threshold) {
      cluster.docs.emplace_back(graph.docs()[j].id, w);
    }
  }

  auto pair_order = [](const std::pair<std::string, double>& a,
                       const std::pair<std::string, double>& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  std::sort(cluster.queries.begin(), cluster.queries.end(), pair_order);
  std::sort(cluster.docs.begin(), cluster.docs.end(), pair_order);
  return cluster;
}

}  // namespace ao
