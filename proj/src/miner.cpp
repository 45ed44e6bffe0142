#include "ao/miner.hpp"

#include <algorithm>
#include <fstream>

#include "ao/jsonl.hpp"
#include "ao/synthetic.hpp"

namespace ao {

namespace {

std::size_t slot_count(const std::vector<std::string>& tokens) {
  std::size_t n = 0;
  for (const auto& t : tokens) {
    if (t == kSlotToken) ++n;
  }
  return n;
}

void split_pattern(const Pattern& pattern, std::vector<std::string>& prefix,
                   std::vector<std::string>& suffix) {
  if (slot_count(pattern.tokens) != 1) {
    throw DataError("pattern must carry exactly one slot: " + pattern.text());
  }
  prefix.clear();
  suffix.clear();
  bool seen = false;
  for (const auto& t : pattern.tokens) {
    if (t == kSlotToken) {
      seen = true;
    } else if (seen) {
      suffix.push_back(t);
    } else {
      prefix.push_back(t);
    }
  }
}

bool matches_at_front(const std::vector<std::string>& prefix,
                      const std::vector<std::string>& tokens) {
  if (prefix.size() > tokens.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), tokens.begin());
}

bool matches_at_back(const std::vector<std::string>& suffix,
                     const std::vector<std::string>& tokens) {
  if (suffix.size() > tokens.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), tokens.rbegin());
}

// First index where `needle` occurs as a contiguous run, or npos.
std::size_t find_subsequence(const std::vector<std::string>& needle,
                             const std::vector<std::string>& haystack) {
  if (needle.empty() || needle.size() > haystack.size()) {
    return std::string::npos;
  }
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) {
      return i;
    }
  }
  return std::string::npos;
}

void append_unique_alias(AttentionPhrase& target, const std::string& alias) {
  if (alias == target.text) return;
  if (std::find(target.aliases.begin(), target.aliases.end(), alias) !=
      target.aliases.end()) {
    return;
  }
  target.aliases.push_back(alias);
}

}  // namespace

const char* phrase_kind_name(PhraseKind k) {
  switch (k) {
    case PhraseKind::Concept: return "concept";
    case PhraseKind::Event: return "event";
    case PhraseKind::Topic: return "topic";
  }
  throw InvariantError("unhandled phrase kind");
}

PhraseKind phrase_kind_from_name(const std::string& s) {
  if (s == "concept") return PhraseKind::Concept;
  if (s == "event") return PhraseKind::Event;
  if (s == "topic") return PhraseKind::Topic;
  throw DataError("unknown phrase kind: " + s);
}

std::string Pattern::text() const { return join(tokens, " "); }

void MinerThresholds::validate() const {
  if (delta_m < 0.0 || delta_m > 1.0) {
    throw DataError("merge threshold must lie in [0,1]");
  }
  if (!(subtitle_min > 0 && subtitle_min < subtitle_max)) {
    throw DataError("subtitle length bounds must satisfy 0 < min < max");
  }
}

void SynonymMap::add_group(const std::vector<std::string>& words) {
  if (words.empty()) return;
  const std::string& head = words.front();
  for (const auto& w : words) canon_[w] = head;
}

std::string SynonymMap::canon(const std::string& word) const {
  auto it = canon_.find(word);
  return it == canon_.end() ? word : it->second;
}

SynonymMap load_synonyms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synonym file: " + path);
  SynonymMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> words;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t tab = line.find('\t', start);
      std::size_t end = tab == std::string::npos ? line.size() : tab;
      std::string word = normalize_text(line.substr(start, end - start));
      if (!word.empty()) words.push_back(word);
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (words.empty()) {
      throw DataError(path, line_no, "synonym group has no words");
    }
    map.add_group(words);
  }
  return map;
}

// ---------------------------------------------------------------------------
// Mining pipeline.

std::string enriched_representation(const AttentionPhrase& phrase,
                                    const QueryDocCluster& cluster,
                                    const ClickGraph& graph) {
  std::set<std::string> member_queries;
  for (const auto& [qid, weight] : cluster.queries) {
    (void)weight;
    member_queries.insert(qid);
  }
  std::vector<std::pair<std::string, std::int64_t>> totals;
  for (const auto& [did, weight] : cluster.docs) {
    (void)weight;
    std::int64_t total = 0;
    for (std::size_t ei : graph.doc_edges(did)) {
      const ClickEdge& edge = graph.edges()[ei];
      if (member_queries.count(edge.query_id) > 0) total += edge.count;
    }
    totals.emplace_back(did, total);
  }
  std::sort(totals.begin(), totals.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> parts{phrase.text};
  for (std::size_t i = 0; i < totals.size() && i < 5; ++i) {
    parts.push_back(graph.doc(totals[i].first).title);
  }
  return join(parts, " ");
}

bool phrases_mergeable(const AttentionPhrase& a, const AttentionPhrase& b,
                       const Annotator& annotator, const SynonymMap* synonyms,
                       const TfIdfIndex& index, double delta_m) {
  auto canon_set = [&](const AttentionPhrase& p) {
    std::set<std::string> out;
    for (const auto& tok : p.tokens) {
      if (annotator.is_stopword(tok)) continue;
      out.insert(synonyms ? synonyms->canon(tok) : tok);
    }
    return out;
  };
  if (canon_set(a) != canon_set(b)) return false;
  double sim = index.cosine(text_terms(a.enriched_repr), text_terms(b.enriched_repr));
  return sim >= delta_m;
}

std::size_t normalize_phrase(AttentionPhrase candidate,
                             std::vector<AttentionPhrase>& accumulated,
                             const Annotator& annotator,
                             const SynonymMap* synonyms, const TfIdfIndex& index,
                             double delta_m) {
  for (std::size_t i = 0; i < accumulated.size(); ++i) {
    AttentionPhrase& existing = accumulated[i];
    if (existing.kind != candidate.kind) continue;
    if (!phrases_mergeable(existing, candidate, annotator, synonyms, index, delta_m)) {
      continue;
    }
    existing.support_queries.insert(candidate.support_queries.begin(),
                                    candidate.support_queries.end());
    existing.support_docs.insert(candidate.support_docs.begin(),
                                 candidate.support_docs.end());
    append_unique_alias(existing, candidate.text);
    for (const auto& alias : candidate.aliases) append_unique_alias(existing, alias);
    return i;
  }
  accumulated.push_back(std::move(candidate));
  return accumulated.size() - 1;
}

MineResult mine_attention_nodes(const std::vector<QueryDocCluster>& clusters,
                                const ClickGraph& graph,
                                const Annotator& annotator,
                                const RgcnModel& model,
                                const MinerThresholds& thresholds,
                                PhraseKind kind,
                                const SynonymMap* synonyms,
                                const AtspParams& atsp) {
  thresholds.validate();
  MineResult result;
  std::vector<AttentionPhrase> candidates;
  for (const auto& cluster : clusters) {
    try {
      std::vector<AnnotatedText> queries;
      std::vector<AnnotatedText> titles;
      for (const auto& [qid, weight] : cluster.queries) {
        (void)weight;
        queries.push_back(annotator.annotate(graph.query(qid).text));
      }
      for (const auto& [did, weight] : cluster.docs) {
        (void)weight;
        titles.push_back(annotator.annotate(graph.doc(did).title));
      }
      InteractionGraph ig = build_qtig(queries, titles);
      std::vector<int> classes = predict_classes(rgcn_forward(model, ig));
      std::set<std::string> positive;
      for (const auto& node : ig.nodes) {
        if (node.seq_id < 2) continue;
        if (classes[node.seq_id] != kClassOther) positive.insert(node.token_text);
      }
      if (positive.empty()) {
        ++result.clusters_skipped;
        continue;
      }
      std::vector<std::string> ordered;
      try {
        ordered = decode_phrase(ig, positive, atsp);
      } catch (const AtspError&) {
        ++result.decode_fallbacks;
        for (const auto& node : ig.nodes) {
          if (node.seq_id >= 2 && positive.count(node.token_text) > 0) {
            ordered.push_back(node.token_text);
          }
        }
      }
      AttentionPhrase phrase;
      phrase.tokens = ordered;
      phrase.text = smart_join(ordered);
      phrase.kind = kind;
      for (const auto& [qid, weight] : cluster.queries) {
        (void)weight;
        phrase.support_queries.insert(qid);
      }
      for (const auto& [did, weight] : cluster.docs) {
        (void)weight;
        phrase.support_docs.insert(did);
      }
      phrase.enriched_repr = enriched_representation(phrase, cluster, graph);
      candidates.push_back(std::move(phrase));
    } catch (const DataError&) {
      ++result.clusters_skipped;
    }
  }
  std::vector<std::vector<std::string>> repr_corpus;
  repr_corpus.reserve(candidates.size());
  for (const auto& c : candidates) repr_corpus.push_back(text_terms(c.enriched_repr));
  TfIdfIndex index = TfIdfIndex::build(repr_corpus);
  for (auto& c : candidates) {
    normalize_phrase(std::move(c), result.phrases, annotator, synonyms, index,
                     thresholds.delta_m);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Weak-supervision builders.

BootstrapResult bootstrap_concepts(const std::vector<std::string>& queries,
                                   const std::vector<Pattern>& seed_patterns,
                                   std::size_t iterations) {
  if (seed_patterns.empty()) {
    throw DataError("bootstrap requires at least one seed pattern");
  }
  std::vector<std::vector<std::string>> query_tokens;
  query_tokens.reserve(queries.size());
  for (const auto& q : queries) {
    query_tokens.push_back(primitive_tokens(normalize_text(q)));
  }

  BootstrapResult out;
  std::set<std::string> pattern_seen;
  std::set<std::string> concept_seen;
  for (const auto& seed : seed_patterns) {
    std::vector<std::string> prefix;
    std::vector<std::string> suffix;
    split_pattern(seed, prefix, suffix);  // validates the single-slot invariant
    if (pattern_seen.insert(seed.text()).second) out.patterns.push_back(seed);
  }

  for (std::size_t iter = 0; iter < iterations; ++iter) {
    // Extract concepts with every known pattern. Anchored match: the query is
    // prefix + a nonempty slot binding + suffix, nothing else.
    for (std::size_t pi = 0; pi < out.patterns.size(); ++pi) {
      std::vector<std::string> prefix;
      std::vector<std::string> suffix;
      split_pattern(out.patterns[pi], prefix, suffix);
      for (const auto& qt : query_tokens) {
        if (qt.size() < prefix.size() + suffix.size() + 1) continue;
        if (!matches_at_front(prefix, qt) || !matches_at_back(suffix, qt)) continue;
        std::vector<std::string> mid(qt.begin() + static_cast<std::ptrdiff_t>(prefix.size()),
                                     qt.end() - static_cast<std::ptrdiff_t>(suffix.size()));
        std::string concept_text = smart_join(mid);
        if (concept_seen.insert(concept_text).second) {
          out.concepts.push_back(concept_text);
        }
      }
    }
    // Learn patterns from the first occurrence of each known concept; the
    // learned template must retain at least one literal token.
    for (std::size_t ci = 0; ci < out.concepts.size(); ++ci) {
      std::vector<std::string> ct = primitive_tokens(out.concepts[ci]);
      if (ct.empty()) continue;
      for (const auto& qt : query_tokens) {
        if (qt.size() <= ct.size()) continue;
        std::size_t at = find_subsequence(ct, qt);
        if (at == std::string::npos) continue;
        Pattern learned;
        learned.source = "bootstrap";
        learned.tokens.assign(qt.begin(), qt.begin() + static_cast<std::ptrdiff_t>(at));
        learned.tokens.push_back(kSlotToken);
        learned.tokens.insert(learned.tokens.end(),
                              qt.begin() + static_cast<std::ptrdiff_t>(at + ct.size()),
                              qt.end());
        if (pattern_seen.insert(learned.text()).second) {
          out.patterns.push_back(std::move(learned));
        }
      }
    }
  }
  return out;
}

std::optional<std::string> align_query_title(const AnnotatedText& query,
                                             const std::vector<AnnotatedText>& titles) {
  std::vector<std::string> q = query.token_texts();
  if (q.empty()) return std::nullopt;
  std::optional<std::string> best;
  std::size_t best_len = 0;
  for (const auto& title : titles) {
    std::vector<std::string> t = title.token_texts();
    for (std::size_t start = 0; start < t.size(); ++start) {
      if (t[start] != q[0]) continue;
      // Greedy forward match yields the shortest window for this start.
      std::size_t qi = 0;
      std::size_t end = start;
      for (std::size_t ti = start; ti < t.size() && qi < q.size(); ++ti) {
        if (t[ti] == q[qi]) {
          ++qi;
          end = ti;
        }
      }
      if (qi < q.size()) continue;
      std::size_t len = end - start + 1;
      if (!best.has_value() || len < best_len) {
        best = smart_join(std::vector<std::string>(
            t.begin() + static_cast<std::ptrdiff_t>(start),
            t.begin() + static_cast<std::ptrdiff_t>(end + 1)));
        best_len = len;
      }
    }
  }
  return best;
}

std::optional<std::string> candidate_event_phrase(
    const std::vector<std::string>& queries,
    const std::vector<std::pair<std::string, double>>& titles_with_ctr,
    const MinerThresholds& thresholds, const Stoplist* stoplist) {
  thresholds.validate();
  std::set<std::string> pool;
  for (const auto& q : queries) {
    std::set<std::string> words = nonstop_words(q, stoplist);
    pool.insert(words.begin(), words.end());
  }
  std::optional<std::string> best;
  std::size_t best_score = 0;
  double best_ctr = 0.0;
  for (const auto& [title, ctr] : titles_with_ctr) {
    std::vector<std::string> prims = primitive_tokens(normalize_text(title));
    std::vector<std::vector<std::string>> runs;
    std::vector<std::string> run;
    for (const auto& tok : prims) {
      if (is_punct_char(tok)) {
        if (!run.empty()) runs.push_back(std::move(run));
        run.clear();
      } else {
        run.push_back(tok);
      }
    }
    if (!run.empty()) runs.push_back(std::move(run));
    for (const auto& subtitle : runs) {
      std::string text = smart_join(subtitle);
      std::size_t length =
          thresholds.subtitle_token_mode ? subtitle.size() : utf8_length(text);
      if (length < thresholds.subtitle_min || length > thresholds.subtitle_max) {
        continue;
      }
      std::set<std::string> sub_tokens(subtitle.begin(), subtitle.end());
      std::size_t score = 0;
      for (const auto& w : pool) {
        if (sub_tokens.count(w) > 0) ++score;
      }
      bool better = !best.has_value() || score > best_score ||
                    (score == best_score && ctr > best_ctr);
      if (better) {
        best = text;
        best_score = score;
        best_ctr = ctr;
      }
    }
  }
  if (best_score == 0) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------
// Derivation of broader attention nodes.

std::vector<std::string> common_suffix_discovery(
    const std::vector<std::string>& concepts, std::size_t min_frequency,
    const Annotator& annotator) {
  std::set<std::string> seen;
  std::map<std::string, std::size_t> counts;
  for (const auto& phrase : concepts) {
    std::string norm = normalize_text(phrase);
    if (!seen.insert(norm).second) continue;
    std::vector<std::string> toks = annotator.annotate(norm).token_texts();
    for (std::size_t start = 1; start < toks.size(); ++start) {
      // A noun phrase never opens with punctuation.
      if (is_punct_char(toks[start])) continue;
      std::vector<std::string> suffix(toks.begin() + static_cast<std::ptrdiff_t>(start),
                                      toks.end());
      counts[smart_join(suffix)] += 1;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [text, n] : counts) {
    if (n < min_frequency) continue;
    AnnotatedText at = annotator.annotate(text);
    if (at.tokens.empty() || at.tokens.back().pos != Pos::noun) continue;
    kept.emplace_back(text, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  out.reserve(kept.size());
  for (const auto& [text, n] : kept) {
    (void)n;
    out.push_back(text);
  }
  return out;
}

namespace {

// Ancestor concepts reachable over isA edges, with minimal hop distance.
std::map<std::string, std::size_t> concept_ancestors(const Ontology& ontology,
                                                     const std::string& id) {
  std::map<std::string, std::size_t> dist;
  std::vector<std::string> frontier{id};
  std::set<std::string> visited{id};
  std::size_t depth = 0;
  while (!frontier.empty()) {
    ++depth;
    std::vector<std::string> next;
    for (const auto& cur : frontier) {
      for (const auto& parent : ontology.parents_of(cur)) {
        if (!visited.insert(parent).second) continue;
        if (ontology.node(parent).kind == NodeKind::Concept) {
          dist.emplace(parent, depth);
        }
        next.push_back(parent);
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

}  // namespace

std::vector<DerivedTopic> common_pattern_discovery(
    const std::vector<std::string>& events, const Ontology& ontology,
    std::int64_t min_search_count,
    const std::map<std::string, std::int64_t>& event_search_counts) {
  std::vector<std::string> evs;
  {
    std::set<std::string> seen;
    for (const auto& e : events) {
      std::string norm = normalize_text(e);
      if (seen.insert(norm).second) evs.push_back(norm);
    }
  }
  std::vector<std::vector<std::string>> toks;
  toks.reserve(evs.size());
  for (const auto& e : evs) toks.push_back(primitive_tokens(e));

  // template text -> (event index -> masked element text)
  std::map<std::string, std::map<std::size_t, std::string>> groups;
  std::map<std::string, Pattern> group_pattern;
  for (std::size_t i = 0; i < evs.size(); ++i) {
    for (std::size_t j = i + 1; j < evs.size(); ++j) {
      const auto& a = toks[i];
      const auto& b = toks[j];
      if (a.empty() || b.empty()) continue;
      std::size_t shorter = std::min(a.size(), b.size());
      std::size_t p = 0;
      while (p < shorter && a[p] == b[p]) ++p;
      if (p == shorter) continue;  // one sequence is a prefix of the other
      std::size_t cap = shorter - p - 1;
      std::size_t s = 0;
      while (s < cap && a[a.size() - 1 - s] == b[b.size() - 1 - s]) ++s;
      if (p == 0 && s == 0) continue;  // template would be a bare slot
      Pattern pattern;
      pattern.source = "cpd";
      pattern.tokens.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(p));
      pattern.tokens.push_back(kSlotToken);
      pattern.tokens.insert(pattern.tokens.end(),
                            a.end() - static_cast<std::ptrdiff_t>(s), a.end());
      std::string key = pattern.text();
      auto mid = [&](const std::vector<std::string>& t) {
        return smart_join(std::vector<std::string>(
            t.begin() + static_cast<std::ptrdiff_t>(p),
            t.end() - static_cast<std::ptrdiff_t>(s)));
      };
      groups[key][i] = mid(a);
      groups[key][j] = mid(b);
      group_pattern.emplace(key, std::move(pattern));
    }
  }

  std::vector<DerivedTopic> out;
  for (const auto& [key, members] : groups) {
    // Intersect the concept-ancestor maps of the member elements, tracking the
    // worst-case hop distance to each shared ancestor.
    std::map<std::string, std::size_t> shared;
    bool ok = true;
    bool first = true;
    for (const auto& [ei, element] : members) {
      (void)ei;
      const AttentionNodeRecord* node = ontology.find_canonical(element);
      if (node == nullptr) {
        ok = false;
        break;
      }
      std::map<std::string, std::size_t> dist = concept_ancestors(ontology, node->id);
      if (first) {
        shared = std::move(dist);
        first = false;
      } else {
        std::map<std::string, std::size_t> merged;
        for (const auto& [aid, d] : shared) {
          auto it = dist.find(aid);
          if (it != dist.end()) merged[aid] = std::max(d, it->second);
        }
        shared = std::move(merged);
      }
      if (shared.empty()) {
        ok = false;
        break;
      }
    }
    if (!ok || shared.empty()) continue;
    // Most fine-grained: minimal worst-case distance, ties to the
    // lexicographically smallest canonical text.
    std::string best_id;
    std::string best_canonical;
    std::size_t best_dist = 0;
    for (const auto& [aid, d] : shared) {
      const std::string& canonical = ontology.node(aid).canonical;
      if (best_id.empty() || d < best_dist ||
          (d == best_dist && canonical < best_canonical)) {
        best_id = aid;
        best_canonical = canonical;
        best_dist = d;
      }
    }
    std::int64_t total = 0;
    for (const auto& [ei, element] : members) {
      (void)element;
      auto it = event_search_counts.find(evs[ei]);
      if (it != event_search_counts.end()) total += it->second;
    }
    if (total < min_search_count) continue;

    const Pattern& pattern = group_pattern.at(key);
    std::vector<std::string> topic_tokens;
    for (const auto& t : pattern.tokens) {
      if (t == kSlotToken) {
        for (const auto& at : primitive_tokens(best_canonical)) {
          topic_tokens.push_back(at);
        }
      } else {
        topic_tokens.push_back(t);
      }
    }
    DerivedTopic topic;
    topic.text = smart_join(topic_tokens);
    topic.pattern = pattern;
    topic.ancestor = best_canonical;
    for (const auto& [ei, element] : members) {
      (void)element;
      topic.member_events.push_back(evs[ei]);
    }
    std::sort(topic.member_events.begin(), topic.member_events.end());
    out.push_back(std::move(topic));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset bridging.

std::vector<DatasetExample> load_dataset(const std::string& path) {
  std::vector<DatasetExample> out;
  read_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    DatasetExample ex;
    if (!rec.contains("queries") || !rec["queries"].is_array()) {
      throw DataError(path, line_no, "expected string array field: queries");
    }
    for (const auto& q : rec["queries"]) {
      if (!q.is_string()) throw DataError(path, line_no, "queries entries must be strings");
      ex.queries.push_back(q.get<std::string>());
    }
    if (!rec.contains("titles") || !rec["titles"].is_array()) {
      throw DataError(path, line_no, "expected string array field: titles");
    }
    for (const auto& t : rec["titles"]) {
      if (!t.is_string()) throw DataError(path, line_no, "titles entries must be strings");
      ex.titles.push_back(t.get<std::string>());
    }
    std::string ctx = path + ":" + std::to_string(line_no);
    ex.gold = require_string(rec, "gold", ctx);
    if (rec.contains("elements")) {
      if (!rec["elements"].is_object()) {
        throw DataError(path, line_no, "elements must be an object");
      }
      for (const auto& [role, toks] : rec["elements"].items()) {
        if (!toks.is_array()) {
          throw DataError(path, line_no, "element role must map to a token array: " + role);
        }
        for (const auto& t : toks) {
          if (!t.is_string()) {
            throw DataError(path, line_no, "element tokens must be strings");
          }
          ex.elements[role].push_back(t.get<std::string>());
        }
      }
    }
    out.push_back(std::move(ex));
  });
  return out;
}

void save_dataset(const std::string& path, const std::vector<DatasetExample>& examples) {
  std::vector<Json> recs;
  recs.reserve(examples.size());
  for (const auto& ex : examples) {
    Json rec;
    rec["queries"] = ex.queries;
    rec["titles"] = ex.titles;
    rec["gold"] = ex.gold;
    if (!ex.elements.empty()) {
      Json elems = Json::object();
      for (const auto& [role, toks] : ex.elements) elems[role] = toks;
      rec["elements"] = elems;
    }
    recs.push_back(std::move(rec));
  }
  write_jsonl(path, recs);
}

void save_phrases(const std::string& path, const std::vector<AttentionPhrase>& phrases) {
  std::vector<Json> recs;
  recs.reserve(phrases.size());
  for (const auto& p : phrases) {
    Json rec;
    rec["text"] = p.text;
    rec["tokens"] = p.tokens;
    rec["kind"] = phrase_kind_name(p.kind);
    rec["support_queries"] = std::vector<std::string>(p.support_queries.begin(),
                                                     p.support_queries.end());
    rec["support_docs"] = std::vector<std::string>(p.support_docs.begin(),
                                                  p.support_docs.end());
    rec["enriched_repr"] = p.enriched_repr;
    rec["aliases"] = p.aliases;
    recs.push_back(std::move(rec));
  }
  write_jsonl(path, recs);
}

std::vector<AttentionPhrase> load_phrases(const std::string& path) {
  std::vector<AttentionPhrase> out;
  read_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    std::string ctx = path + ":" + std::to_string(line_no);
    AttentionPhrase p;
    p.text = require_string(rec, "text", ctx);
    p.kind = phrase_kind_from_name(require_string(rec, "kind", ctx));
    p.enriched_repr = require_string(rec, "enriched_repr", ctx);
    auto string_list = [&](const char* key) {
      std::vector<std::string> values;
      if (!rec.contains(key) || !rec[key].is_array()) {
        throw DataError(ctx + ": expected string array '" + key + "'");
      }
      for (const auto& v : rec[key]) {
        if (!v.is_string()) {
          throw DataError(ctx + ": expected string array '" + key + "'");
        }
        values.push_back(v.get<std::string>());
      }
      return values;
    };
    p.tokens = string_list("tokens");
    p.aliases = string_list("aliases");
    for (auto& q : string_list("support_queries")) p.support_queries.insert(std::move(q));
    for (auto& d : string_list("support_docs")) p.support_docs.insert(std::move(d));
    out.push_back(std::move(p));
  });
  return out;
}

TrainExample make_train_example(const DatasetExample& example,
                                const Annotator& annotator, bool event_elements) {
  std::vector<AnnotatedText> queries;
  std::vector<AnnotatedText> titles;
  for (const auto& q : example.queries) queries.push_back(annotator.annotate(q));
  for (const auto& t : example.titles) titles.push_back(annotator.annotate(t));
  TrainExample out;
  out.graph = build_qtig(queries, titles);

  std::map<std::string, int> label_of;
  if (event_elements) {
    static const std::map<std::string, int> kRoleClass = {
        {"entity", kClassEntity},
        {"trigger", kClassTrigger},
        {"location", kClassLocation},
    };
    for (const auto& [role, toks] : example.elements) {
      auto it = kRoleClass.find(role);
      if (it == kRoleClass.end()) {
        throw DataError("unknown element role: " + role);
      }
      for (const auto& tok : toks) label_of[normalize_text(tok)] = it->second;
    }
  } else {
    for (const auto& tok : annotator.annotate(example.gold).tokens) {
      label_of[tok.text] = 1;
    }
  }

  out.labels.assign(out.graph.nodes.size(), kClassOther);
  for (const auto& node : out.graph.nodes) {
    if (node.seq_id < 2) continue;
    auto it = label_of.find(node.token_text);
    if (it != label_of.end()) out.labels[node.seq_id] = it->second;
  }
  return out;
}

}  // namespace ao
