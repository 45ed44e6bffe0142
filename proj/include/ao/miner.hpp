// Attention-phrase mining: cluster-to-phrase pipeline (graph build, node
// classification, route decoding, normalization), weak-supervision builders,
// and suffix/pattern derivation of broader attention nodes.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ao/annotate.hpp"
#include "ao/atsp.hpp"
#include "ao/click_graph.hpp"
#include "ao/ontology.hpp"
#include "ao/random_walk.hpp"
#include "ao/rgcn.hpp"
#include "ao/tfidf.hpp"

namespace ao {

enum class PhraseKind { Concept, Event, Topic };

const char* phrase_kind_name(PhraseKind k);
PhraseKind phrase_kind_from_name(const std::string& s);

struct AttentionPhrase {
  std::string text;
  std::vector<std::string> tokens;
  PhraseKind kind = PhraseKind::Concept;
  std::set<std::string> support_queries;
  std::set<std::string> support_docs;
  // Phrase text followed by its top-5 clicked titles.
  std::string enriched_repr;
  std::vector<std::string> aliases;  // texts merged into this phrase
};

struct Pattern {
  std::vector<std::string> tokens;  // exactly one slot marker among them
  std::string source;               // "bootstrap" or "cpd"

  std::string text() const;
};

inline constexpr const char* kSlotToken = "<x>";

struct MinerThresholds {
  double delta_m = 0.3;              // enriched-representation merge threshold
  std::size_t subtitle_min = 6;      // L_l, chars (or tokens in token mode)
  std::size_t subtitle_max = 20;     // L_h
  std::size_t bootstrap_iterations = 2;
  std::int64_t topic_min_search_count = 1;
  std::size_t min_frequency = 3;     // suffix support floor
  bool subtitle_token_mode = false;

  void validate() const;  // requires 0 < subtitle_min < subtitle_max
};

// Synonym groups; words in one group canonicalize to the group head.
class SynonymMap {
public:
  void add_group(const std::vector<std::string>& words);
  std::string canon(const std::string& word) const;
  std::size_t size() const { return canon_.size(); }

private:
  std::map<std::string, std::string> canon_;
};

// One group per line, words tab-separated, first word is the head.
SynonymMap load_synonyms(const std::string& path);

// ---------------------------------------------------------------------------
// Mining pipeline.

struct MineResult {
  std::vector<AttentionPhrase> phrases;
  std::size_t clusters_skipped = 0;   // classifier marked no positive nodes
  std::size_t decode_fallbacks = 0;   // unreachable route, input-order used
};

// Per cluster: annotate members, build the interaction graph, classify nodes
// with the binary model, order positives by route decoding (falling back to
// first-appearance order when no route exists), then normalize the candidate
// against the accumulated list. Per-cluster failures are counted, not fatal.
MineResult mine_attention_nodes(const std::vector<QueryDocCluster>& clusters,
                                const ClickGraph& graph,
                                const Annotator& annotator,
                                const RgcnModel& model,
                                const MinerThresholds& thresholds,
                                PhraseKind kind,
                                const SynonymMap* synonyms = nullptr,
                                const AtspParams& atsp = {});

// Phrase text plus the titles of the five cluster docs with the highest click
// totals from cluster queries.
std::string enriched_representation(const AttentionPhrase& phrase,
                                    const QueryDocCluster& cluster,
                                    const ClickGraph& graph);

// Merge test: (i) synonym-canonicalized non-stop token sets are equal, and
// (ii) TF-IDF cosine of the enriched representations reaches delta_m.
bool phrases_mergeable(const AttentionPhrase& a, const AttentionPhrase& b,
                       const Annotator& annotator, const SynonymMap* synonyms,
                       const TfIdfIndex& index, double delta_m);

// Merges `candidate` into an existing phrase of the same kind when mergeable
// (union support, alias recorded, enriched repr of the survivor kept);
// appends otherwise. Returns the index of the surviving phrase.
std::size_t normalize_phrase(AttentionPhrase candidate,
                             std::vector<AttentionPhrase>& accumulated,
                             const Annotator& annotator,
                             const SynonymMap* synonyms, const TfIdfIndex& index,
                             double delta_m);

// ---------------------------------------------------------------------------
// Weak-supervision builders.

struct BootstrapResult {
  std::vector<Pattern> patterns;
  std::vector<std::string> concepts;
};

// Alternates extract-by-pattern and learn-pattern-from-concept for the given
// number of iterations; both sets only grow.
BootstrapResult bootstrap_concepts(const std::vector<std::string>& queries,
                                   const std::vector<Pattern>& seed_patterns,
                                   std::size_t iterations);

// Minimal title window containing every query token in query order (extra
// tokens may interleave); none when no title qualifies.
std::optional<std::string> align_query_title(const AnnotatedText& query,
                                             const std::vector<AnnotatedText>& titles);

// Split titles into subtitles at punctuation runs, keep those within the
// length bounds, score by unique non-stop query tokens contained, break ties
// by click-through rate. None when nothing qualifies or every score is zero.
std::optional<std::string> candidate_event_phrase(
    const std::vector<std::string>& queries,
    const std::vector<std::pair<std::string, double>>& titles_with_ctr,
    const MinerThresholds& thresholds, const Stoplist* stoplist = nullptr);

// ---------------------------------------------------------------------------
// Derivation of broader attention nodes.

// High-frequency strict token suffixes whose head (final) token is a noun.
// Sorted by descending support, then text.
std::vector<std::string> common_suffix_discovery(
    const std::vector<std::string>& concepts, std::size_t min_frequency,
    const Annotator& annotator);

struct DerivedTopic {
  std::string text;
  Pattern pattern;
  std::string ancestor;  // concept substituted into the slot
  std::vector<std::string> member_events;
};

// Groups events whose token sequences are equal after masking one contiguous
// differing span, replaces the span with the most fine-grained common concept
// ancestor of the masked elements, and drops topics whose member events were
// searched fewer than min_search_count times in total.
std::vector<DerivedTopic> common_pattern_discovery(
    const std::vector<std::string>& events, const Ontology& ontology,
    std::int64_t min_search_count,
    const std::map<std::string, std::int64_t>& event_search_counts);

// ---------------------------------------------------------------------------
// Dataset bridging (training examples from phrase-level gold answers).

struct DatasetExample {
  std::vector<std::string> queries;
  std::vector<std::string> titles;
  std::string gold;
  std::map<std::string, std::vector<std::string>> elements;  // event mode
};

// JSONL: {"queries": [...], "titles": [...], "gold": str, "elements": {...}?}
std::vector<DatasetExample> load_dataset(const std::string& path);
void save_dataset(const std::string& path, const std::vector<DatasetExample>& examples);

// JSONL: {"text", "tokens", "kind", "support_queries", "support_docs",
// "enriched_repr", "aliases"}; round-trips phrases exactly, sets sorted.
void save_phrases(const std::string& path, const std::vector<AttentionPhrase>& phrases);
std::vector<AttentionPhrase> load_phrases(const std::string& path);

// Node labels from gold tokens: binary phrase membership, or 4-class element
// roles (other/entity/trigger/location) when `event_elements` is set.
TrainExample make_train_example(const DatasetExample& example,
                                const Annotator& annotator, bool event_elements);

}  // namespace ao
