// Independent reference implementations used to freeze expected values in
// tests. Each deliberately recomputes from first principles rather than
// calling the library code under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "ao/click_graph.hpp"

namespace oracle {

// Dense personalized power iteration: row-stochastic transition matrix with
// dangling rows redirected to the seed, v' = a * e_seed + (1 - a) * T^t v.
inline std::vector<double> walk_probabilities(const ao::ClickGraph& graph,
                                              const std::string& seed_query_id,
                                              double restart,
                                              std::size_t max_iterations,
                                              double epsilon) {
  std::size_t nq = graph.query_count();
  std::size_t n = nq + graph.doc_count();
  std::size_t seed = graph.query_pos(seed_query_id);

  std::vector<std::vector<double>> counts(n, std::vector<double>(n, 0.0));
  for (const auto& edge : graph.edges()) {
    std::size_t q = graph.query_pos(edge.query_id);
    std::size_t d = nq + graph.doc_pos(edge.doc_id);
    counts[q][d] += static_cast<double>(edge.count);
    counts[d][q] += static_cast<double>(edge.count);
  }
  std::vector<std::vector<double>> transition(n, std::vector<double>(n, 0.0));
  for (std::size_t v = 0; v < n; ++v) {
    double total = std::accumulate(counts[v].begin(), counts[v].end(), 0.0);
    if (total == 0.0) {
      transition[v][seed] = 1.0;
    } else {
      for (std::size_t w = 0; w < n; ++w) transition[v][w] = counts[v][w] / total;
    }
  }

  std::vector<double> p(n, 0.0);
  p[seed] = 1.0;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    std::vector<double> next(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t w = 0; w < n; ++w) next[w] += p[v] * transition[v][w];
    }
    double diff = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] = restart * (v == seed ? 1.0 : 0.0) + (1.0 - restart) * next[v];
      diff = std::max(diff, std::abs(next[v] - p[v]));
    }
    p.swap(next);
    if (diff < epsilon) break;
  }
  return p;
}

// Exhaustive open tour search: permutations of the interior indices between
// fixed start 0 and end n-1; -1 marks an unreachable leg. Returns the best
// cost and the lexicographically smallest optimal order, or no value when
// every permutation crosses an unreachable leg.
struct BruteTour {
  bool feasible = false;
  long long cost = 0;
  std::vector<std::size_t> order;  // full node sequence including 0 and n-1
};

inline BruteTour brute_force_atsp(const std::vector<std::vector<int>>& dist) {
  std::size_t n = dist.size();
  BruteTour best;
  if (n < 2) return best;
  std::vector<std::size_t> interior(n >= 2 ? n - 2 : 0);
  std::iota(interior.begin(), interior.end(), 1);
  std::sort(interior.begin(), interior.end());
  do {
    long long cost = 0;
    bool ok = true;
    std::size_t prev = 0;
    for (std::size_t v : interior) {
      if (dist[prev][v] < 0) { ok = false; break; }
      cost += dist[prev][v];
      prev = v;
    }
    if (ok) {
      if (dist[prev][n - 1] < 0) {
        ok = false;
      } else {
        cost += dist[prev][n - 1];
      }
    }
    if (ok && (!best.feasible || cost < best.cost)) {
      best.feasible = true;
      best.cost = cost;
      best.order.clear();
      best.order.push_back(0);
      best.order.insert(best.order.end(), interior.begin(), interior.end());
      best.order.push_back(n - 1);
    }
  } while (std::next_permutation(interior.begin(), interior.end()));
  return best;
}

// TF-IDF with the pinned conventions: tf = raw count, idf = ln((1+N)/(1+df))
// + 1, cosine over tf * idf vectors.
inline double tfidf_cosine(const std::vector<std::vector<std::string>>& corpus,
                           const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::set<std::string> seen(doc.begin(), doc.end());
    for (const auto& term : seen) df[term] += 1;
  }
  double n = static_cast<double>(corpus.size());
  auto vec = [&](const std::vector<std::string>& terms) {
    std::map<std::string, double> weights;
    for (const auto& t : terms) weights[t] += 1.0;
    for (auto& [term, w] : weights) {
      double d = df.count(term) ? static_cast<double>(df.at(term)) : 0.0;
      w *= std::log((1.0 + n) / (1.0 + d)) + 1.0;
    }
    return weights;
  };
  std::map<std::string, double> va = vec(a);
  std::map<std::string, double> vb = vec(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [term, w] : va) {
    na += w * w;
    auto it = vb.find(term);
    if (it != vb.end()) dot += w * it->second;
  }
  for (const auto& [term, w] : vb) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Seeded bipartite click graph with every query clicking at least one doc.
inline ao::ClickGraph random_click_graph(std::uint64_t seed, std::size_t n_queries,
                                         std::size_t n_docs) {
  ao::Rng rng(seed);
  ao::ClickGraph graph;
  for (std::size_t q = 0; q < n_queries; ++q) {
    ao::QueryRecord rec;
    rec.id = "q" + std::to_string(q);
    rec.text = "query " + std::to_string(q);
    graph.add_query(rec);
  }
  for (std::size_t d = 0; d < n_docs; ++d) {
    ao::DocRecord rec;
    rec.id = "d" + std::to_string(d);
    rec.title = "title " + std::to_string(d);
    graph.add_doc(rec);
  }
  for (std::size_t q = 0; q < n_queries; ++q) {
    std::size_t fan = 1 + rng.below(3);
    for (std::size_t k = 0; k < fan; ++k) {
      std::size_t d = rng.below(n_docs);
      graph.add_click("q" + std::to_string(q), "d" + std::to_string(d),
                      static_cast<std::int64_t>(1 + rng.below(9)));
    }
  }
  return graph;
}

}  // namespace oracle
