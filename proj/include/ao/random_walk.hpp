// Seeded clustering over the click graph: personalized power iteration with
// restart at the seed query, thresholding, and the non-stop-word keep rule.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ao/annotate.hpp"
#include "ao/click_graph.hpp"

namespace ao {

struct WalkParams {
  double restart_probability = 0.15;   // in (0,1)
  std::size_t max_iterations = 50;
  double convergence_epsilon = 1e-8;   // L-infinity stop criterion
  double visit_threshold = 0.001;      // keep nodes with visit prob >= this
  double overlap_fraction = 0.5;       // query keep rule, strict majority share

  void validate() const;
};

struct QueryDocCluster {
  std::string seed_query_id;
  // (id, visit probability), sorted by probability descending, id ascending on
  // ties. The seed query is always present.
  std::vector<std::pair<std::string, double>> queries;
  std::vector<std::pair<std::string, double>> docs;
};

// Stationary visit probabilities of the restart walk, ordered as
// queries()[0..Q) then docs()[0..D). Probability mass at nodes without
// outgoing edges returns to the seed. Sums to 1 up to convergence error.
std::vector<double> walk_visit_probabilities(const ClickGraph& graph,
                                             const TransitionModel& model,
                                             const std::string& seed_query_id,
                                             const WalkParams& params);

// Threshold + keep rules on top of the visit probabilities. A kept query must
// share more than overlap_fraction of its non-stop words with the cluster's
// accumulated non-stop vocabulary, which starts from the seed query and grows
// with each kept query (descending probability order). Queries with no
// non-stop words pass vacuously. Docs are kept by threshold alone.
QueryDocCluster random_walk_cluster(const ClickGraph& graph,
                                    const TransitionModel& model,
                                    const std::string& seed_query_id,
                                    const WalkParams& params,
                                    const Stoplist* stoplist = nullptr);

// Non-stop, non-punctuation primitive tokens of normalized text.
std::set<std::string> nonstop_words(const std::string& text, const Stoplist* stoplist);

}  // namespace ao
