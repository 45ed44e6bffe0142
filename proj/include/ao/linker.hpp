// Relationship construction between attention nodes: category isA links by
// click-ratio, suffix/pattern/containment isA rules, involve containment,
// concept-entity evidence classification, entity embeddings with hinge loss,
// and correlate edges by embedding distance.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ao/annotate.hpp"
#include "ao/click_graph.hpp"
#include "ao/miner.hpp"
#include "ao/ontology.hpp"
#include "ao/rgcn.hpp"

namespace ao {

// Proposed relationship between attention nodes, addressed by canonical phrase
// text; `rule` names the producing heuristic and becomes edge provenance.
struct LinkEdge {
  std::string src;
  std::string dst;
  Relation relation = Relation::IsA;
  double weight = 1.0;
  std::string rule;
};

struct LinkReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;           // duplicate or cycle-closing
  std::size_t missing_endpoints = 0;  // no node with that canonical text
};

// Resolves LinkEdge texts against node canonicals and inserts the edges.
LinkReport emit_links(Ontology& ontology, const std::vector<LinkEdge>& links);

// ---------------------------------------------------------------------------
// Category links.

struct CategoryLinkStats {
  std::int64_t n_p = 0;  // clicked docs for the attention used as a query
  std::map<std::string, std::int64_t> n_pg;  // per-category doc counts

  void validate() const;  // counts >= 0, sum <= n_p
};

// Edges (category, P(g|p)) for every category whose share strictly exceeds
// delta_g; sorted by probability descending, category ascending.
std::vector<std::pair<std::string, double>> link_attention_category(
    const CategoryLinkStats& stats, double delta_g);

// Click-derived stats for one attention phrase: docs clicked from queries
// whose text contains the phrase, counted once per doc under its category.
CategoryLinkStats category_stats_for_phrase(const AttentionPhrase& phrase,
                                            const ClickGraph& graph);

// ---------------------------------------------------------------------------
// isA / involve rules over mined phrases.

// Suffix rule (concept pairs), shared-pattern rule (event/topic pairs whose
// slot fillers are ontology isA-related), containment rule (event pairs).
// The shorter or more general phrase is always the parent (src).
std::vector<LinkEdge> link_isa_between_attentions(
    const std::vector<AttentionPhrase>& phrases, const Ontology& ontology);

// Involve edge topic -> concept when the concept token sequence is contained
// in the topic phrase and the texts differ.
std::vector<LinkEdge> link_involve_concept_topic(
    const std::vector<AttentionPhrase>& concepts,
    const std::vector<AttentionPhrase>& topics);

// ---------------------------------------------------------------------------
// Concept-entity evidence.

struct SessionRecord {
  std::string user;
  std::int64_t time = 0;  // seconds since epoch
  std::string query;
};

// JSONL: {"user": str, "time": int, "query": str}
std::vector<SessionRecord> load_session_log(const std::string& path);

inline constexpr std::int64_t kSessionGapSeconds = 1800;

// Per-user time-ordered runs, split where the gap exceeds the window.
std::vector<std::vector<SessionRecord>> sessionize(
    std::vector<SessionRecord> records,
    std::int64_t gap_seconds = kSessionGapSeconds);

struct ConceptEntityExample {
  std::string concept_phrase;
  std::string entity;
  std::string context;
  bool positive = false;
  std::string provenance;  // consecutive-query | clicked-doc | synthetic-negative
  // Token offset where a synthetic negative inserted the entity; unset
  // otherwise.
  std::optional<std::size_t> insert_pos;
};

// Positives: concept query directly followed by an entity query in a session,
// and entities mentioned in docs clicked from a concept query. Negatives:
// sibling entities (shared isA parent) spliced into the clicked doc context at
// a seeded position. Deterministic per seed.
std::vector<ConceptEntityExample> build_concept_entity_dataset(
    const ClickGraph& graph, const std::vector<SessionRecord>& sessions,
    const Ontology& ontology, std::uint64_t seed);

class ConceptEntityClassifier {
public:
  virtual ~ConceptEntityClassifier() = default;
  virtual void train(const std::vector<ConceptEntityExample>& dataset) = 0;
  virtual double score(const ConceptEntityExample& example) const = 0;
  virtual bool trained() const = 0;
};

// Score in [0,1]; label = score > 0.5. Untrained classifier -> error.
std::pair<bool, double> classify_concept_entity(
    const ConceptEntityClassifier& classifier, const ConceptEntityExample& example);

// Logistic regression over fixed lexical features of (concept, entity,
// context): token Jaccard, entity-in-context, concept-in-context, head-token
// match, mention-distance decay, and the fraction of context tokens drawn
// from the pair. Full-batch gradient descent, deterministic.
class LexicalLogisticClassifier : public ConceptEntityClassifier {
public:
  LexicalLogisticClassifier() = default;
  LexicalLogisticClassifier(double learning_rate, std::size_t epochs)
      : learning_rate_(learning_rate), epochs_(epochs) {}

  void train(const std::vector<ConceptEntityExample>& dataset) override;
  double score(const ConceptEntityExample& example) const override;
  bool trained() const override { return trained_; }

  // Bias plus one weight per feature.
  static Eigen::VectorXd features(const ConceptEntityExample& example);
  const Eigen::VectorXd& weights() const { return weights_; }

private:
  Eigen::VectorXd weights_;
  double learning_rate_ = 0.5;
  std::size_t epochs_ = 500;
  bool trained_ = false;
};

// ---------------------------------------------------------------------------
// Event elements.

struct ElementPrediction {
  std::vector<std::string> entities;
  std::vector<std::string> triggers;
  std::vector<std::string> locations;
};

// 4-class node classification over the interaction graph; class ties resolve
// toward "other" so uncertain nodes emit nothing. Model must have 4 classes.
ElementPrediction recognize_event_elements(const RgcnModel& model,
                                           const InteractionGraph& graph);

// Involve proposals event -> element for every recognized element token.
std::vector<LinkEdge> element_involve_edges(const std::string& event_text,
                                            const ElementPrediction& prediction);

// ---------------------------------------------------------------------------
// Entity embeddings and correlate edges.

struct EntityEmbeddings {
  std::vector<std::string> names;  // sorted unique
  Eigen::MatrixXd vectors;         // one row per name
  double margin = 1.0;

  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  std::size_t index(const std::string& name) const;  // unknown -> error
  double distance(const std::string& a, const std::string& b) const;
};

struct EmbedConfig {
  std::size_t dim = 16;
  double margin = 1.0;
  std::uint64_t seed = 1;
  std::size_t epochs = 200;
  double learning_rate = 0.1;
  std::size_t negatives_per_positive = 5;

  void validate() const;  // dim >= 1, margin > 0, learning_rate > 0
};

struct EmbedResult {
  EntityEmbeddings embeddings;
  // Hinge loss before each accepted step; non-increasing because steps that
  // would raise the loss are retried with a halved rate.
  std::vector<double> loss_trace;
};

// Minimizes sum of max(0, d(a,b) - d(a,n) + margin) over the positives with
// seeded fixed negatives, Euclidean d, full-batch descent with backtracking.
// No positives -> initial embeddings unchanged.
EmbedResult train_entity_embeddings(
    const std::vector<std::pair<std::string, std::string>>& positive_pairs,
    const std::vector<std::string>& all_entities, const EmbedConfig& config);

// Correlate edge for every pair at distance strictly below the threshold
// (default margin/2), weight 1 - d/threshold, names in sorted order.
std::vector<LinkEdge> link_correlate(const EntityEmbeddings& embeddings,
                                     std::optional<double> threshold = std::nullopt);

}  // namespace ao
