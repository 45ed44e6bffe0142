// Applications over a built ontology: event similarity and story trees,
// document tagging by concepts and events, query rewriting and entity
// recommendation.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ao/annotate.hpp"
#include "ao/click_graph.hpp"
#include "ao/embedder.hpp"
#include "ao/ontology.hpp"

namespace ao {

// ---------------------------------------------------------------------------
// Event similarity.

struct EventInfo {
  std::string id;
  std::string phrase;
  std::string trigger;
  std::vector<std::string> entities;  // sorted unique canonical texts
  std::int64_t time = 0;
};

// The paper-shaped three-term sum carries optional weights, all defaulting
// to 1.
struct SimilarityWeights {
  double semantic = 1.0;
  double trigger = 1.0;
  double entities = 1.0;
};

// s = w_m * cos(embed(phrase)) + w_g * trigger similarity + w_e * TF-IDF
// similarity of the entity sets (each entity one term, statistics over the
// two sets). Equal trigger strings score exactly 1; otherwise their vectors
// (from `trigger_vectors` when both present, else the embedder) are compared
// by cosine. Symmetric by construction.
double event_similarity(const EventInfo& a, const EventInfo& b,
                        const PhraseEmbedder& embedder,
                        const std::map<std::string, Eigen::VectorXd>* trigger_vectors = nullptr,
                        const SimilarityWeights& weights = {});

// Event view of an ontology node: phrase = canonical, trigger and time from
// the attributes, entities = involve-child Entity canonicals.
EventInfo event_info(const Ontology& ontology, const std::string& event_id);

// ---------------------------------------------------------------------------
// Story trees.

struct StoryNode {
  std::string event_id;
  std::int64_t time = 0;
  std::optional<std::size_t> parent;  // index into StoryTree::nodes
  std::size_t branch = 0;             // cluster index in placement order
  std::vector<std::string> doc_ids;
};

struct StoryTree {
  std::string root_label;  // phrase of the chronologically first event
  std::vector<StoryNode> nodes;  // root first; child timestamps >= parent's
};

struct StoryTreeParams {
  double cut_threshold = 1.5;  // stop merging below this average similarity
  SimilarityWeights weights;
};

// Retrieves events sharing at least one involve-child entity with the seed,
// clusters seed plus retrieved by average-linkage over event_similarity
// (merging while the best average reaches the cut), then forms the tree:
// events sorted by time, each cluster a chronological chain on one branch,
// later chains attached at the latest already-placed event not after their
// head. A seed without involve edges yields a single-node tree.
StoryTree build_story_tree(const std::string& seed_event_id, const Ontology& ontology,
                           const PhraseEmbedder& embedder,
                           const StoryTreeParams& params = {},
                           const std::map<std::string, std::vector<std::string>>* event_docs = nullptr);

// Average-linkage agglomerative clustering over a symmetric similarity
// matrix; merges the highest-average pair while that average is >= cut, ties
// to the lowest cluster indexes. Returns clusters as sorted index lists,
// ordered by smallest member.
std::vector<std::vector<std::size_t>> average_linkage_clusters(
    const Eigen::MatrixXd& similarity, double cut);

// ---------------------------------------------------------------------------
// Document tagging.

struct TagEntry {
  std::string node_id;
  double score = 0.0;
  std::string method;  // match | infer | lcs | semantic
};

struct TagResult {
  std::string doc_id;
  std::vector<TagEntry> tags;  // score descending, node id ascending
};

// Entity canonicals mentioned in the doc (title plus content head), ranked by
// mention count descending, canonical ascending, cut to the top 5.
std::vector<std::string> key_entities(const DocRecord& doc, const Ontology& ontology);

// P(concept | word) = 1/|concepts whose canonical contains the word| for
// concepts containing it, 0 otherwise; sums to 1 over concepts when any
// contain the word.
std::map<std::string, double> concept_substring_distribution(
    const Ontology& ontology, const std::string& word);

// Matching path: isA-parent concepts of the key entities, scored by TF-IDF
// cosine between the doc title and the concept representation (enriched
// representation when supplied, else canonical plus aliases). When no key
// entity has a parent concept, the inference path scores every concept by
// P(c|d) = sum_i P(c|e_i) P(e_i|d) with same-sentence co-occurrence inside
// the doc. Tags with score > threshold, sorted.
TagResult tag_concepts(const DocRecord& doc, const Ontology& ontology,
                       const Stoplist* stoplist = nullptr,
                       double score_threshold = 0.0,
                       const std::map<std::string, std::string>* enriched = nullptr);

// Pluggable second-stage matcher for event tagging.
class TagMatcher {
public:
  virtual ~TagMatcher() = default;
  virtual bool matches(const std::string& phrase, const std::string& target) const = 0;
};

// Bag-of-words cosine over primitive tokens against a fixed threshold.
class BowCosineMatcher : public TagMatcher {
public:
  explicit BowCosineMatcher(double threshold = 0.5) : threshold_(threshold) {}
  bool matches(const std::string& phrase, const std::string& target) const override;

private:
  double threshold_;
};

// Tags the doc with every event whose phrase reaches the character-level LCS
// floor (lcs_fraction of the phrase length) against title plus first content
// sentence AND passes the matcher. Score = LCS length / phrase length.
TagResult tag_events(const DocRecord& doc, const Ontology& ontology,
                     double lcs_fraction = 0.8, const TagMatcher* matcher = nullptr);

// Character-level longest common subsequence length over UTF-8 code points.
std::size_t lcs_length(const std::string& a, const std::string& b);

// ---------------------------------------------------------------------------
// Query understanding.

struct QueryUnderstanding {
  // "query + entity" per isA-child entity of a concept found in the query.
  std::vector<std::string> rewrites;
  // Correlate neighbors of entities found in the query.
  std::vector<std::string> recommendations;
};

QueryUnderstanding understand_query(const std::string& query, const Ontology& ontology);

}  // namespace ao
