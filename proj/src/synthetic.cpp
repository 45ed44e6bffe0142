#include "ao/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "ao/jsonl.hpp"

namespace ao {
namespace {

const char* kSyllables[] = {"ba", "ce", "di", "fo", "gu", "ka", "lo", "mi",
                            "nu", "po", "ra", "su", "ta", "ve", "wi", "zo"};
constexpr std::size_t kSyllableCount = sizeof(kSyllables) / sizeof(kSyllables[0]);

const char* kStopwords[] = {"the", "of", "a", "in", "on", "at", "is", "to", "for", "and"};

const char* kCategories[] = {"sports", "music", "film", "games", "tech"};

// Fixed epoch base so generated corpora are byte-identical across runs.
constexpr std::int64_t kTimeBase = 1500000000;

// Content words are 3-4 syllables (6-8 chars); fillers are 2 syllables
// (4 chars). The length gap keeps the char-length feature informative.
std::string make_word(Rng& rng, std::size_t syllables, std::set<std::string>& used) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kSyllables[rng.below(kSyllableCount)];
    }
    if (used.insert(w).second) return w;
  }
  throw InvariantError("synthetic vocabulary exhausted");
}

std::string content_word(Rng& rng, std::set<std::string>& used) {
  return make_word(rng, 3 + rng.below(2), used);
}

std::string filler_word(Rng& rng, std::set<std::string>& used) {
  return make_word(rng, 2, used);
}

// Corruption applied to non-seed queries and to titles: filler insertion,
// adjacent swap, and (queries only) single-token dropout. The seed query is
// never corrupted, so every phrase token keeps a low sequence id.
std::vector<std::string> corrupt(std::vector<std::string> tokens, double noise,
                                 bool allow_dropout, Rng& rng,
                                 const std::vector<std::string>& fillers) {
  if (noise <= 0.0) return tokens;
  if (rng.real() < noise && !fillers.empty()) {
    std::size_t pos = rng.below(tokens.size() + 1);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                  fillers[rng.below(fillers.size())]);
  }
  if (allow_dropout && tokens.size() > 1 && rng.real() < noise) {
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(rng.below(tokens.size())));
  }
  if (tokens.size() > 1 && rng.real() < noise) {
    std::size_t i = rng.below(tokens.size() - 1);
    std::swap(tokens[i], tokens[i + 1]);
  }
  return tokens;
}

}  // namespace

Lexicon SynthResult::lexicon() const {
  Lexicon lex;
  for (const auto& e : lexicon_entries) lex.add(e);
  return lex;
}

Stoplist SynthResult::stoplist() const {
  Stoplist stop;
  for (const auto& w : stopwords) stop.add(w);
  return stop;
}

SynthResult generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.n_clusters == 0) throw DataError("synthetic spec requires at least one cluster");
  if (spec.queries_per_cluster == 0 || spec.docs_per_cluster == 0) {
    throw DataError("synthetic spec requires at least one query and one doc per cluster");
  }
  if (spec.noise < 0.0 || spec.noise > 1.0) {
    throw DataError("synthetic noise rate must lie in [0,1]");
  }
  if (spec.phrase_len_min < 1 || spec.phrase_len_max < spec.phrase_len_min) {
    throw DataError("synthetic phrase length bounds are degenerate");
  }

  Rng rng(seed);
  SynthResult result;
  for (const char* w : kStopwords) result.stopwords.push_back(w);

  std::set<std::string> used_words;
  for (const char* w : kStopwords) used_words.insert(w);

  // Shared filler vocabulary; fillers are plain short nouns.
  std::vector<std::string> fillers;
  for (std::size_t i = 0; i < 12; ++i) fillers.push_back(filler_word(rng, used_words));

  for (std::size_t c = 0; c < spec.n_clusters; ++c) {
    SynthCluster cluster;
    std::string cid = std::to_string(c);

    std::vector<std::string> phrase;
    if (spec.kind == SynthKind::concepts) {
      std::size_t len = spec.phrase_len_min +
                        rng.below(spec.phrase_len_max - spec.phrase_len_min + 1);
      for (std::size_t i = 0; i < len; ++i) phrase.push_back(content_word(rng, used_words));
      for (const auto& t : phrase) cluster.token_labels[t] = kClassEntity;
    } else {
      // Event skeleton: entity (1-2 tokens), trigger verb, plain object,
      // optional location. Roles are exposed through the emitted lexicon.
      std::size_t entity_len = 1 + rng.below(2);
      std::vector<std::string> entity_tokens;
      for (std::size_t i = 0; i < entity_len; ++i) {
        entity_tokens.push_back(content_word(rng, used_words));
      }
      std::string trigger = content_word(rng, used_words);
      std::string object = content_word(rng, used_words);
      bool has_location = rng.below(2) == 0;
      std::string location = has_location ? content_word(rng, used_words) : "";

      Ner entity_ner = rng.below(2) == 0 ? Ner::person : Ner::org;
      for (const auto& t : entity_tokens) {
        phrase.push_back(t);
        cluster.token_labels[t] = kClassEntity;
        cluster.elements["entity"].push_back(t);
        result.lexicon_entries.push_back(LexiconEntry{t, Pos::noun, entity_ner});
      }
      phrase.push_back(trigger);
      cluster.token_labels[trigger] = kClassTrigger;
      cluster.elements["trigger"].push_back(trigger);
      result.lexicon_entries.push_back(LexiconEntry{trigger, Pos::verb, Ner::none});
      phrase.push_back(object);
      cluster.token_labels[object] = kClassOther;
      if (has_location) {
        phrase.push_back(location);
        cluster.token_labels[location] = kClassLocation;
        cluster.elements["location"].push_back(location);
        result.lexicon_entries.push_back(LexiconEntry{location, Pos::noun, Ner::location});
      }
    }

    cluster.phrase_tokens = phrase;
    cluster.gold_phrase = join(phrase, " ");

    std::string category = kCategories[c % (sizeof(kCategories) / sizeof(kCategories[0]))];

    // Queries: the seed query is the clean planted phrase; the rest are
    // corrupted variants.
    for (std::size_t qi = 0; qi < spec.queries_per_cluster; ++qi) {
      std::vector<std::string> toks = qi == 0
          ? phrase
          : corrupt(phrase, spec.noise, /*allow_dropout=*/true, rng, fillers);
      std::string qid = "q" + cid + "_" + std::to_string(qi);
      result.graph.add_query(QueryRecord{qid, join(toks, " "), category});
      cluster.query_ids.push_back(qid);
      if (qi == 0) cluster.seed_query_id = qid;
    }

    // Titles always keep every phrase token; they gain filler context and,
    // under noise, extra insertions and swaps.
    for (std::size_t di = 0; di < spec.docs_per_cluster; ++di) {
      std::vector<std::string> toks = phrase;
      std::size_t extra = 1 + rng.below(2);
      for (std::size_t e = 0; e < extra; ++e) {
        std::size_t pos = rng.below(toks.size() + 1);
        std::string filler = rng.below(4) == 0
            ? result.stopwords[rng.below(result.stopwords.size())]
            : fillers[rng.below(fillers.size())];
        toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(pos), filler);
      }
      toks = corrupt(std::move(toks), spec.noise, /*allow_dropout=*/false, rng, fillers);
      std::string did = "d" + cid + "_" + std::to_string(di);
      DocRecord doc;
      doc.id = did;
      doc.title = join(toks, " ");
      doc.category = category;
      doc.publish_time = kTimeBase + static_cast<std::int64_t>(c) * 86400 +
                         static_cast<std::int64_t>(di) * 3600;
      result.graph.add_doc(doc);
      cluster.doc_ids.push_back(did);
    }

    // Every query clicks every doc in its cluster. The seed query gets the
    // highest counts so top-clicked titles are stable.
    for (std::size_t qi = 0; qi < spec.queries_per_cluster; ++qi) {
      for (std::size_t di = 0; di < spec.docs_per_cluster; ++di) {
        std::int64_t count = qi == 0 ? 5 + static_cast<std::int64_t>(
                                               spec.docs_per_cluster - di)
                                     : 1 + static_cast<std::int64_t>(rng.below(3));
        result.graph.add_click(cluster.query_ids[qi], cluster.doc_ids[di], count);
      }
    }

    // Fillers and stopwords present anywhere in the cluster are labeled other.
    for (const auto& w : fillers) {
      if (cluster.token_labels.find(w) == cluster.token_labels.end()) {
        cluster.token_labels[w] = kClassOther;
      }
    }
    for (const auto& w : result.stopwords) {
      if (cluster.token_labels.find(w) == cluster.token_labels.end()) {
        cluster.token_labels[w] = kClassOther;
      }
    }

    result.clusters.push_back(std::move(cluster));
  }

  // Deduplicate lexicon entries (shared across clusters is fine; keys unique).
  std::sort(result.lexicon_entries.begin(), result.lexicon_entries.end(),
            [](const LexiconEntry& a, const LexiconEntry& b) { return a.phrase < b.phrase; });
  result.lexicon_entries.erase(
      std::unique(result.lexicon_entries.begin(), result.lexicon_entries.end(),
                  [](const LexiconEntry& a, const LexiconEntry& b) {
                    return a.phrase == b.phrase;
                  }),
      result.lexicon_entries.end());

  return result;
}

Json dataset_record(const SynthResult& result, const SynthCluster& cluster) {
  Json rec;
  rec["queries"] = Json::array();
  for (const auto& qid : cluster.query_ids) {
    rec["queries"].push_back(result.graph.query(qid).text);
  }
  rec["titles"] = Json::array();
  for (const auto& did : cluster.doc_ids) {
    rec["titles"].push_back(result.graph.doc(did).title);
  }
  rec["gold"] = cluster.gold_phrase;
  if (!cluster.elements.empty()) {
    Json elems = Json::object();
    for (const auto& [role, toks] : cluster.elements) elems[role] = toks;
    rec["elements"] = elems;
  }
  return rec;
}

void write_dataset(const std::string& path, const SynthResult& result) {
  std::vector<Json> recs;
  recs.reserve(result.clusters.size());
  for (const auto& c : result.clusters) recs.push_back(dataset_record(result, c));
  write_jsonl(path, recs);
}

void write_truth(const std::string& path, const SynthResult& result) {
  Json root;
  root["clusters"] = Json::array();
  for (const auto& c : result.clusters) {
    Json jc;
    jc["seed_query_id"] = c.seed_query_id;
    jc["gold"] = c.gold_phrase;
    jc["tokens"] = c.phrase_tokens;
    jc["query_ids"] = c.query_ids;
    jc["doc_ids"] = c.doc_ids;
    Json labels = Json::object();
    for (const auto& [tok, cls] : c.token_labels) labels[tok] = cls;
    jc["labels"] = labels;
    if (!c.elements.empty()) {
      Json elems = Json::object();
      for (const auto& [role, toks] : c.elements) elems[role] = toks;
      jc["elements"] = elems;
    }
    root["clusters"].push_back(jc);
  }
  write_json_file(path, root);
}

void write_lexicon_file(const std::string& path,
                        const std::vector<LexiconEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (const auto& e : entries) {
    out << e.phrase << '\t' << pos_name(e.pos) << '\t' << ner_name(e.ner) << '\n';
  }
}

void write_stoplist_file(const std::string& path,
                         const std::vector<std::string>& words) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (const auto& w : words) out << w << '\n';
}

}  // namespace ao
