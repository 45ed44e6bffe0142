// Orders predicted positive nodes into a phrase: shortest start-to-end route
// over the decoding graph, exact for small instances, local-search heuristic
// above the threshold.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ao/qtig.hpp"

namespace ao {

// No finite-cost tour; carries the offending matrix indexes.
class AtspError : public DataError {
public:
  AtspError(const std::string& msg, std::vector<std::size_t> nodes)
      : DataError(msg), unreachable(std::move(nodes)) {}
  std::vector<std::size_t> unreachable;
};

struct Tour {
  std::vector<std::size_t> order;  // matrix indexes, start first, end last
  long long cost = 0;
  // Cost after construction and after each accepted local-search improvement;
  // non-increasing by contract.
  std::vector<long long> improvement_trace;
};

struct AtspParams {
  std::size_t exact_threshold = 10;  // interior count at or below -> exact DP
  std::uint64_t seed = 1;
  std::size_t restarts = 32;
};

// Distance matrix convention: index 0 is the start, the last index is the end,
// everything between is an interior node that must be visited exactly once;
// -1 marks an unreachable pair. Ties between equal-cost tours resolve to the
// lexicographically smallest index sequence (exact solver) or are compared
// explicitly (heuristic restarts).
Tour solve_atsp_exact(const std::vector<std::vector<int>>& dist);
Tour solve_atsp_heuristic(const std::vector<std::vector<int>>& dist,
                          std::uint64_t seed, std::size_t restarts);
Tour solve_atsp(const std::vector<std::vector<int>>& dist,
                const AtspParams& params = {});

// Decoding-graph route over the positives; returns the interior token texts in
// tour order. Unreachable positives propagate as AtspError.
std::vector<std::string> decode_phrase(const InteractionGraph& graph,
                                       const std::set<std::string>& positive,
                                       const AtspParams& params = {});

}  // namespace ao
