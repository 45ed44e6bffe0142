// Synthetic corpus generator with planted ground truth. Clusters of queries
// and titles are built around planted phrases so that extraction quality can
// be scored against a known answer at desk scale.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ao/annotate.hpp"
#include "ao/click_graph.hpp"
#include "ao/jsonl.hpp"

namespace ao {

enum class SynthKind { concepts, events };

struct SynthSpec {
  std::size_t n_clusters = 10;
  std::size_t queries_per_cluster = 4;  // first query is always the clean phrase
  std::size_t docs_per_cluster = 3;
  double noise = 0.0;  // corruption rate in [0,1] for non-seed inputs
  SynthKind kind = SynthKind::concepts;
  std::size_t phrase_len_min = 2;  // concept mode token count bounds
  std::size_t phrase_len_max = 4;
};

// Node classes used for gold labels. Concept mode uses only other/entity as a
// binary phrase-membership signal (1 = in phrase).
inline constexpr int kClassOther = 0;
inline constexpr int kClassEntity = 1;
inline constexpr int kClassTrigger = 2;
inline constexpr int kClassLocation = 3;

struct SynthCluster {
  std::string seed_query_id;
  std::string gold_phrase;                  // planted phrase, normalized
  std::vector<std::string> phrase_tokens;   // in gold order
  std::vector<std::string> query_ids;       // seed first
  std::vector<std::string> doc_ids;
  std::map<std::string, int> token_labels;  // token text -> class
  // Event mode only: element role -> token list ("entity"/"trigger"/"location").
  std::map<std::string, std::vector<std::string>> elements;
};

struct SynthResult {
  ClickGraph graph;
  std::vector<SynthCluster> clusters;
  std::vector<LexiconEntry> lexicon_entries;  // tags for event element tokens
  std::vector<std::string> stopwords;

  Lexicon lexicon() const;
  Stoplist stoplist() const;
};

// Deterministic for a fixed (spec, seed) pair; throws DataError on a
// degenerate spec (zero clusters, zero queries/docs, noise outside [0,1]).
SynthResult generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

// Dataset record for one cluster: {"queries": [...], "titles": [...],
// "gold": str, "elements": {...}} with elements present in event mode.
Json dataset_record(const SynthResult& result, const SynthCluster& cluster);

void write_dataset(const std::string& path, const SynthResult& result);
void write_truth(const std::string& path, const SynthResult& result);
void write_lexicon_file(const std::string& path,
                        const std::vector<LexiconEntry>& entries);
void write_stoplist_file(const std::string& path,
                         const std::vector<std::string>& words);

}  // namespace ao
