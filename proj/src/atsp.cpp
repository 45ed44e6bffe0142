#include "ao/atsp.hpp"

#include <algorithm>
#include <limits>

namespace ao {
namespace {

constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

long long cell(const std::vector<std::vector<int>>& dist, std::size_t i, std::size_t j) {
  int d = dist[i][j];
  return d < 0 ? kInf : static_cast<long long>(d);
}

void check_matrix(const std::vector<std::vector<int>>& dist) {
  if (dist.size() < 2) throw DataError("distance matrix needs start and end nodes");
  for (const auto& row : dist) {
    if (row.size() != dist.size()) throw DataError("distance matrix is not square");
  }
}

// Interior nodes that no edge can enter or leave; reported when no finite
// tour exists.
std::vector<std::size_t> blocked_nodes(const std::vector<std::vector<int>>& dist) {
  std::size_t m = dist.size();
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j + 1 < m; ++j) {
    bool can_enter = false, can_leave = false;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      if (i != j && cell(dist, i, j) < kInf) can_enter = true;
    }
    for (std::size_t i = 1; i < m; ++i) {
      if (i != j && cell(dist, j, i) < kInf) can_leave = true;
    }
    if (!can_enter || !can_leave) out.push_back(j);
  }
  return out;
}

[[noreturn]] void throw_unreachable(const std::vector<std::vector<int>>& dist) {
  std::vector<std::size_t> nodes = blocked_nodes(dist);
  if (nodes.empty()) {
    for (std::size_t j = 1; j + 1 < dist.size(); ++j) nodes.push_back(j);
  }
  std::string msg = "no finite tour; unreachable nodes:";
  for (std::size_t j : nodes) msg += " " + std::to_string(j);
  throw AtspError(msg, std::move(nodes));
}

long long tour_cost(const std::vector<std::vector<int>>& dist,
                    const std::vector<std::size_t>& order) {
  long long total = 0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    long long d = cell(dist, order[i], order[i + 1]);
    if (d >= kInf) return kInf;
    total += d;
  }
  return total;
}

// One full local-search pass: segment reversal (2-opt, directed costs
// recomputed), single/short segment relocation (Or-opt), and pairwise node
// exchange. Returns true if the order improved.
bool improve_once(const std::vector<std::vector<int>>& dist,
                  std::vector<std::size_t>& order, long long& cost) {
  std::size_t m = order.size();
  for (std::size_t a = 1; a + 1 < m; ++a) {
    for (std::size_t b = a; b + 1 < m; ++b) {
      // Reverse order[a..b].
      std::vector<std::size_t> cand = order;
      std::reverse(cand.begin() + static_cast<std::ptrdiff_t>(a),
                   cand.begin() + static_cast<std::ptrdiff_t>(b) + 1);
      long long c = tour_cost(dist, cand);
      if (c < cost) {
        order = std::move(cand);
        cost = c;
        return true;
      }
    }
  }
  for (std::size_t len = 1; len <= 3; ++len) {
    for (std::size_t a = 1; a + len < m; ++a) {
      for (std::size_t to = 1; to + 1 < m; ++to) {
        if (to >= a && to <= a + len) continue;
        std::vector<std::size_t> cand;
        cand.reserve(m);
        std::vector<std::size_t> seg(order.begin() + static_cast<std::ptrdiff_t>(a),
                                     order.begin() + static_cast<std::ptrdiff_t>(a + len));
        for (std::size_t i = 0; i < m; ++i) {
          if (i >= a && i < a + len) continue;
          cand.push_back(order[i]);
        }
        std::size_t insert_at = to < a ? to : to - len;
        if (insert_at >= cand.size()) continue;
        cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(insert_at),
                    seg.begin(), seg.end());
        if (cand.front() != order.front() || cand.back() != order.back()) continue;
        long long c = tour_cost(dist, cand);
        if (c < cost) {
          order = std::move(cand);
          cost = c;
          return true;
        }
      }
    }
  }
  for (std::size_t a = 1; a + 1 < m; ++a) {
    for (std::size_t b = a + 1; b + 1 < m; ++b) {
      std::vector<std::size_t> cand = order;
      std::swap(cand[a], cand[b]);
      long long c = tour_cost(dist, cand);
      if (c < cost) {
        order = std::move(cand);
        cost = c;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

Tour solve_atsp_exact(const std::vector<std::vector<int>>& dist) {
  check_matrix(dist);
  std::size_t m = dist.size();
  std::size_t k = m - 2;  // interior count
  std::size_t end = m - 1;
  if (k > 20) throw DataError("exact solver limited to 20 interior nodes");

  if (k == 0) {
    long long d = cell(dist, 0, end);
    if (d >= kInf) throw_unreachable(dist);
    return Tour{{0, end}, d, {d}};
  }

  // h[S][j]: minimal cost from interior j through exactly the set S of
  // remaining interiors, finishing at the end node. Interior i maps to
  // matrix index i+1 and bit i.
  std::size_t full = (std::size_t{1} << k) - 1;
  std::vector<std::vector<long long>> h(full + 1,
                                        std::vector<long long>(k, kInf));
  for (std::size_t j = 0; j < k; ++j) h[0][j] = cell(dist, j + 1, end);
  for (std::size_t S = 1; S <= full; ++S) {
    for (std::size_t j = 0; j < k; ++j) {
      if (S & (std::size_t{1} << j)) continue;
      long long best = kInf;
      for (std::size_t t = 0; t < k; ++t) {
        if (!(S & (std::size_t{1} << t))) continue;
        long long step = cell(dist, j + 1, t + 1);
        long long rest = h[S ^ (std::size_t{1} << t)][t];
        if (step < kInf && rest < kInf) best = std::min(best, step + rest);
      }
      h[S][j] = best;
    }
  }

  long long best = kInf;
  for (std::size_t j = 0; j < k; ++j) {
    long long step = cell(dist, 0, j + 1);
    long long rest = h[full ^ (std::size_t{1} << j)][j];
    if (step < kInf && rest < kInf) best = std::min(best, step + rest);
  }
  if (best >= kInf) throw_unreachable(dist);

  // Greedy front reconstruction: lowest matrix index wins among optimal
  // continuations, which makes the tour lexicographically smallest.
  Tour tour;
  tour.order.push_back(0);
  std::size_t S = full;
  std::size_t cur = 0;  // matrix index
  long long remaining = best;
  while (S != 0) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!(S & (std::size_t{1} << j))) continue;
      long long step = cell(dist, cur, j + 1);
      long long rest = h[S ^ (std::size_t{1} << j)][j];
      if (step < kInf && rest < kInf && step + rest == remaining) {
        tour.order.push_back(j + 1);
        cur = j + 1;
        remaining -= step;
        S ^= std::size_t{1} << j;
        break;
      }
    }
  }
  tour.order.push_back(end);
  tour.cost = best;
  tour.improvement_trace = {best};
  return tour;
}

Tour solve_atsp_heuristic(const std::vector<std::vector<int>>& dist,
                          std::uint64_t seed, std::size_t restarts) {
  check_matrix(dist);
  std::size_t m = dist.size();
  std::size_t end = m - 1;
  std::vector<std::size_t> interior;
  for (std::size_t i = 1; i < end; ++i) interior.push_back(i);

  Tour best;
  best.cost = kInf;
  bool have = false;

  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(restarts, 1);
       ++attempt) {
    std::vector<std::size_t> order;
    order.push_back(0);
    if (attempt == 0) {
      // Nearest-neighbor construction; ties to the lowest index.
      std::vector<bool> used(m, false);
      std::size_t cur = 0;
      for (std::size_t step = 0; step < interior.size(); ++step) {
        std::size_t pick = m;
        long long pick_d = kInf;
        for (std::size_t j : interior) {
          if (used[j]) continue;
          long long d = cell(dist, cur, j);
          if (pick == m || d < pick_d) {
            pick = j;
            pick_d = d;
          }
        }
        used[pick] = true;
        order.push_back(pick);
        cur = pick;
      }
    } else {
      std::vector<std::size_t> shuffled = interior;
      Rng rng(seed + attempt);
      rng.shuffle(shuffled);
      for (std::size_t j : shuffled) order.push_back(j);
    }
    order.push_back(end);

    long long cost = tour_cost(dist, order);
    std::vector<long long> trace{cost};
    while (improve_once(dist, order, cost)) trace.push_back(cost);

    bool better = !have || cost < best.cost ||
                  (cost == best.cost && order < best.order);
    if (better) {
      best.order = order;
      best.cost = cost;
      best.improvement_trace = std::move(trace);
      have = true;
    }
  }

  if (best.cost >= kInf) throw_unreachable(dist);
  return best;
}

Tour solve_atsp(const std::vector<std::vector<int>>& dist, const AtspParams& params) {
  check_matrix(dist);
  std::size_t interior = dist.size() - 2;
  if (interior <= params.exact_threshold) return solve_atsp_exact(dist);
  return solve_atsp_heuristic(dist, params.seed, params.restarts);
}

std::vector<std::string> decode_phrase(const InteractionGraph& graph,
                                       const std::set<std::string>& positive,
                                       const AtspParams& params) {
  DecodingGraph dg = build_decoding_graph(graph, positive);
  Tour tour = solve_atsp(dg.dist, params);
  std::vector<std::string> out;
  for (std::size_t i = 1; i + 1 < tour.order.size(); ++i) {
    out.push_back(dg.keys[tour.order[i]]);
  }
  return out;
}

}  // namespace ao
