#include "ao/apps.hpp"

#include <algorithm>
#include <set>

#include "ao/tfidf.hpp"

namespace ao {

namespace {

std::size_t count_occurrences(const std::vector<std::string>& needle,
                              const std::vector<std::string>& hay) {
  if (needle.empty() || needle.size() > hay.size()) return 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) {
      ++n;
    }
  }
  return n;
}

bool is_sentence_break(const std::string& ch) {
  return ch == "." || ch == "!" || ch == "?" || ch == ";" || ch == "。" ||
         ch == "！" || ch == "？" || ch == "；";
}

std::vector<std::string> split_sentences(const std::string& normalized) {
  std::vector<std::string> out;
  std::string current;
  for (const auto& ch : utf8_chars(normalized)) {
    if (is_sentence_break(ch)) {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

std::string doc_text(const DocRecord& doc) {
  std::string text = doc.title;
  if (doc.content_head.has_value()) text += " " + *doc.content_head;
  return normalize_text(text);
}

void sort_tags(std::vector<TagEntry>& tags) {
  std::sort(tags.begin(), tags.end(), [](const TagEntry& a, const TagEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node_id < b.node_id;
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Event similarity.

double event_similarity(const EventInfo& a, const EventInfo& b,
                        const PhraseEmbedder& embedder,
                        const std::map<std::string, Eigen::VectorXd>* trigger_vectors,
                        const SimilarityWeights& weights) {
  double f_m = dense_cosine(embedder.embed(a.phrase), embedder.embed(b.phrase));
  double f_g;
  if (a.trigger == b.trigger) {
    f_g = 1.0;
  } else {
    const Eigen::VectorXd* va = nullptr;
    const Eigen::VectorXd* vb = nullptr;
    if (trigger_vectors != nullptr) {
      auto ia = trigger_vectors->find(a.trigger);
      auto ib = trigger_vectors->find(b.trigger);
      if (ia != trigger_vectors->end() && ib != trigger_vectors->end()) {
        va = &ia->second;
        vb = &ib->second;
      }
    }
    f_g = (va != nullptr) ? dense_cosine(*va, *vb)
                          : dense_cosine(embedder.embed(a.trigger),
                                         embedder.embed(b.trigger));
  }
  TfIdfIndex index = TfIdfIndex::build({a.entities, b.entities});
  double f_e = index.cosine(a.entities, b.entities);
  return weights.semantic * f_m + weights.trigger * f_g + weights.entities * f_e;
}

EventInfo event_info(const Ontology& ontology, const std::string& event_id) {
  const AttentionNodeRecord& node = ontology.node(event_id);
  if (node.kind != NodeKind::Event) {
    throw DataError("node is not an event: " + event_id);
  }
  EventInfo info;
  info.id = node.id;
  info.phrase = node.canonical;
  info.trigger = node.attributes.trigger;
  info.time = node.attributes.time.value_or(0);
  std::set<std::string> entities;
  for (const auto& child : ontology.traverse(event_id, Relation::Involve,
                                             TraverseDirection::Out, 1)) {
    const AttentionNodeRecord& c = ontology.node(child);
    if (c.kind == NodeKind::Entity) entities.insert(c.canonical);
  }
  info.entities.assign(entities.begin(), entities.end());
  return info;
}

// ---------------------------------------------------------------------------
// Story trees.

std::vector<std::vector<std::size_t>> average_linkage_clusters(
    const Eigen::MatrixXd& similarity, double cut) {
  if (similarity.rows() != similarity.cols()) {
    throw DataError("similarity matrix must be square");
  }
  std::size_t n = static_cast<std::size_t>(similarity.rows());
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  std::vector<bool> active(n, true);

  while (true) {
    double best = 0.0;
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        double sum = 0.0;
        for (std::size_t x : clusters[i]) {
          for (std::size_t y : clusters[j]) {
            sum += similarity(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
          }
        }
        double avg = sum / static_cast<double>(clusters[i].size() * clusters[j].size());
        if (bi == n || avg > best) {
          best = avg;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || best < cut) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(clusters[bi].begin(), clusters[bi].end());
    clusters[bj].clear();
    active[bj] = false;
  }

  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) out.push_back(clusters[i]);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

StoryTree build_story_tree(const std::string& seed_event_id, const Ontology& ontology,
                           const PhraseEmbedder& embedder,
                           const StoryTreeParams& params,
                           const std::map<std::string, std::vector<std::string>>* event_docs) {
  EventInfo seed = event_info(ontology, seed_event_id);
  std::set<std::string> seed_entities(seed.entities.begin(), seed.entities.end());

  std::vector<EventInfo> events{seed};
  if (!seed_entities.empty()) {
    for (const auto& node : ontology.nodes()) {
      if (node.kind != NodeKind::Event || node.id == seed_event_id) continue;
      EventInfo info = event_info(ontology, node.id);
      bool shares = std::any_of(info.entities.begin(), info.entities.end(),
                                [&](const std::string& e) {
                                  return seed_entities.count(e) > 0;
                                });
      if (shares) events.push_back(std::move(info));
    }
  }
  std::sort(events.begin(), events.end(), [](const EventInfo& a, const EventInfo& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.id < b.id;
  });

  std::size_t n = events.size();
  Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = event_similarity(events[i], events[j], embedder, nullptr, params.weights);
      sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
      sim(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
    }
  }
  std::vector<std::vector<std::size_t>> clusters =
      average_linkage_clusters(sim, params.cut_threshold);

  StoryTree tree;
  tree.root_label = events.front().phrase;
  std::vector<std::size_t> node_of(n, 0);
  auto append_node = [&](std::size_t event_idx, std::optional<std::size_t> parent,
                         std::size_t branch) {
    StoryNode node;
    node.event_id = events[event_idx].id;
    node.time = events[event_idx].time;
    node.parent = parent;
    node.branch = branch;
    if (event_docs != nullptr) {
      auto it = event_docs->find(node.event_id);
      if (it != event_docs->end()) node.doc_ids = it->second;
    }
    node_of[event_idx] = tree.nodes.size();
    tree.nodes.push_back(std::move(node));
  };

  for (std::size_t b = 0; b < clusters.size(); ++b) {
    const std::vector<std::size_t>& members = clusters[b];
    for (std::size_t k = 0; k < members.size(); ++k) {
      std::size_t ev = members[k];
      if (k > 0) {
        append_node(ev, node_of[members[k - 1]], b);
        continue;
      }
      if (b == 0) {
        append_node(ev, std::nullopt, b);
        continue;
      }
      // Chain head: attach to the latest already-placed event not after it.
      // The root always qualifies because events are sorted by time.
      std::size_t parent = 0;
      bool found = false;
      for (std::size_t p = 0; p < tree.nodes.size(); ++p) {
        const StoryNode& placed = tree.nodes[p];
        if (placed.time > events[ev].time) continue;
        if (!found || placed.time > tree.nodes[parent].time ||
            (placed.time == tree.nodes[parent].time &&
             placed.event_id > tree.nodes[parent].event_id)) {
          parent = p;
          found = true;
        }
      }
      append_node(ev, parent, b);
    }
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Document tagging.

std::vector<std::string> key_entities(const DocRecord& doc, const Ontology& ontology) {
  std::vector<std::string> tokens = text_terms(doc_text(doc));
  std::vector<std::pair<std::string, std::size_t>> counted;
  for (const auto& node : ontology.nodes()) {
    if (node.kind != NodeKind::Entity) continue;
    std::size_t count = count_occurrences(text_terms(node.canonical), tokens);
    if (count > 0) counted.emplace_back(node.canonical, count);
  }
  std::sort(counted.begin(), counted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < counted.size() && i < 5; ++i) {
    out.push_back(counted[i].first);
  }
  return out;
}

std::map<std::string, double> concept_substring_distribution(
    const Ontology& ontology, const std::string& word) {
  std::string w = normalize_text(word);
  std::vector<std::string> containing;
  for (const auto& node : ontology.nodes()) {
    if (node.kind != NodeKind::Concept) continue;
    if (node.canonical.find(w) != std::string::npos) containing.push_back(node.id);
  }
  std::map<std::string, double> out;
  if (containing.empty()) return out;
  double p = 1.0 / static_cast<double>(containing.size());
  for (const auto& id : containing) out[id] = p;
  return out;
}

TagResult tag_concepts(const DocRecord& doc, const Ontology& ontology,
                       const Stoplist* stoplist, double score_threshold,
                       const std::map<std::string, std::string>* enriched) {
  TagResult result;
  result.doc_id = doc.id;
  std::vector<std::string> keys = key_entities(doc, ontology);
  if (keys.empty()) return result;

  // Matching path: parent concepts of the key entities.
  std::set<std::string> candidates;
  for (const auto& canonical : keys) {
    const AttentionNodeRecord* entity = ontology.find_canonical(canonical);
    if (entity == nullptr) continue;
    for (const auto& parent : ontology.parents_of(entity->id)) {
      if (ontology.node(parent).kind == NodeKind::Concept) candidates.insert(parent);
    }
  }

  if (!candidates.empty()) {
    std::vector<std::string> title_terms = text_terms(doc.title);
    std::vector<std::pair<std::string, std::vector<std::string>>> reprs;
    for (const auto& id : candidates) {
      const AttentionNodeRecord& node = ontology.node(id);
      std::string repr;
      if (enriched != nullptr) {
        auto it = enriched->find(node.canonical);
        if (it != enriched->end()) repr = it->second;
      }
      if (repr.empty()) {
        repr = node.canonical;
        for (const auto& alias : node.aliases) repr += " " + alias;
      }
      reprs.emplace_back(id, text_terms(repr));
    }
    std::vector<std::vector<std::string>> corpus{title_terms};
    for (const auto& [id, terms] : reprs) {
      (void)id;
      corpus.push_back(terms);
    }
    TfIdfIndex index = TfIdfIndex::build(corpus);
    for (const auto& [id, terms] : reprs) {
      double score = index.cosine(title_terms, terms);
      if (score > score_threshold) {
        result.tags.push_back(TagEntry{id, score, "match"});
      }
    }
    sort_tags(result.tags);
    return result;
  }

  // Inference path: P(c|d) = sum_i P(c|e_i) P(e_i|d), context words taken
  // from sentences mentioning the entity.
  std::vector<std::string> sentences = split_sentences(normalize_text(doc.title));
  if (doc.content_head.has_value()) {
    for (auto& s : split_sentences(normalize_text(*doc.content_head))) {
      sentences.push_back(std::move(s));
    }
  }
  std::vector<std::string> all_tokens = text_terms(doc_text(doc));
  std::map<std::string, std::size_t> entity_counts;
  std::size_t total_count = 0;
  for (const auto& canonical : keys) {
    std::size_t c = count_occurrences(text_terms(canonical), all_tokens);
    entity_counts[canonical] = c;
    total_count += c;
  }
  if (total_count == 0) return result;

  std::map<std::string, double> concept_scores;
  for (const auto& canonical : keys) {
    double p_e_d = static_cast<double>(entity_counts[canonical]) /
                   static_cast<double>(total_count);
    std::vector<std::string> etoks = text_terms(canonical);
    std::set<std::string> eset(etoks.begin(), etoks.end());
    std::map<std::string, std::size_t> context_counts;
    std::size_t context_total = 0;
    for (const auto& sentence : sentences) {
      std::vector<std::string> stoks = text_terms(sentence);
      if (count_occurrences(etoks, stoks) == 0) continue;
      for (const auto& tok : stoks) {
        if (eset.count(tok) > 0) continue;
        if (stoplist != nullptr && stoplist->contains(tok)) continue;
        context_counts[tok] += 1;
        ++context_total;
      }
    }
    if (context_total == 0) continue;
    for (const auto& [word, count] : context_counts) {
      double p_x_e = static_cast<double>(count) / static_cast<double>(context_total);
      for (const auto& [concept_id, p_c_x] :
           concept_substring_distribution(ontology, word)) {
        concept_scores[concept_id] += p_c_x * p_x_e * p_e_d;
      }
    }
  }
  for (const auto& [id, score] : concept_scores) {
    if (score > score_threshold) result.tags.push_back(TagEntry{id, score, "infer"});
  }
  sort_tags(result.tags);
  return result;
}

bool BowCosineMatcher::matches(const std::string& phrase, const std::string& target) const {
  std::map<std::string, double> a;
  std::map<std::string, double> b;
  for (const auto& t : text_terms(phrase)) a[t] += 1.0;
  for (const auto& t : text_terms(target)) b[t] += 1.0;
  return sparse_cosine(a, b) >= threshold_;
}

std::size_t lcs_length(const std::string& a, const std::string& b) {
  std::vector<std::string> x = utf8_chars(a);
  std::vector<std::string> y = utf8_chars(b);
  std::vector<std::size_t> prev(y.size() + 1, 0);
  std::vector<std::size_t> cur(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = (x[i - 1] == y[j - 1]) ? prev[j - 1] + 1
                                      : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

TagResult tag_events(const DocRecord& doc, const Ontology& ontology,
                     double lcs_fraction, const TagMatcher* matcher) {
  static const BowCosineMatcher kDefaultMatcher;
  const TagMatcher& gate = (matcher != nullptr) ? *matcher
                                                : static_cast<const TagMatcher&>(kDefaultMatcher);
  TagResult result;
  result.doc_id = doc.id;
  std::string target = normalize_text(doc.title);
  if (doc.content_head.has_value()) {
    std::vector<std::string> sentences = split_sentences(normalize_text(*doc.content_head));
    if (!sentences.empty()) target += " " + sentences.front();
  }
  for (const auto& node : ontology.nodes()) {
    if (node.kind != NodeKind::Event) continue;
    std::size_t plen = utf8_length(node.canonical);
    if (plen == 0) continue;
    std::size_t lcs = lcs_length(node.canonical, target);
    double score = static_cast<double>(lcs) / static_cast<double>(plen);
    if (score < lcs_fraction) continue;
    if (!gate.matches(node.canonical, target)) continue;
    result.tags.push_back(TagEntry{node.id, score, "lcs"});
  }
  sort_tags(result.tags);
  return result;
}

// ---------------------------------------------------------------------------
// Query understanding.

QueryUnderstanding understand_query(const std::string& query, const Ontology& ontology) {
  QueryUnderstanding out;
  std::string qnorm = normalize_text(query);
  std::vector<std::string> qtoks = text_terms(qnorm);
  std::set<std::string> seen_rewrites;
  std::set<std::string> seen_recommendations;
  for (const auto& node : ontology.nodes()) {
    std::vector<std::string> ntoks = text_terms(node.canonical);
    if (ntoks.empty() || !is_contiguous_subsequence(ntoks, qtoks)) continue;
    if (node.kind == NodeKind::Concept) {
      for (const auto& child : ontology.children_of(node.id)) {
        const AttentionNodeRecord& c = ontology.node(child);
        if (c.kind != NodeKind::Entity) continue;
        std::string rewrite = qnorm + " " + c.canonical;
        if (seen_rewrites.insert(rewrite).second) out.rewrites.push_back(rewrite);
      }
    } else if (node.kind == NodeKind::Entity) {
      for (const auto& [neighbor, weight] : ontology.correlates_of(node.id)) {
        (void)weight;
        const std::string& canonical = ontology.node(neighbor).canonical;
        if (seen_recommendations.insert(canonical).second) {
          out.recommendations.push_back(canonical);
        }
      }
    }
  }
  return out;
}

}  // namespace ao
