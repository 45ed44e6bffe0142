#include "ao/linker.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ao/jsonl.hpp"
#include "ao/synthetic.hpp"

namespace ao {

namespace {

std::vector<std::string> text_tokens(const std::string& text) {
  return primitive_tokens(normalize_text(text));
}

// Pairwise template split: longest common prefix, then longest common suffix
// capped so both middles keep at least one token. Nullopt when the sequences
// admit no such split or the template would be a bare slot.
struct TemplateSplit {
  std::size_t prefix = 0;
  std::size_t suffix = 0;
};

std::optional<TemplateSplit> split_template(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  std::size_t shorter = std::min(a.size(), b.size());
  std::size_t p = 0;
  while (p < shorter && a[p] == b[p]) ++p;
  if (p == shorter) return std::nullopt;
  std::size_t cap = shorter - p - 1;
  std::size_t s = 0;
  while (s < cap && a[a.size() - 1 - s] == b[b.size() - 1 - s]) ++s;
  if (p == 0 && s == 0) return std::nullopt;
  return TemplateSplit{p, s};
}

std::string middle_text(const std::vector<std::string>& tokens, const TemplateSplit& t) {
  return smart_join(std::vector<std::string>(
      tokens.begin() + static_cast<std::ptrdiff_t>(t.prefix),
      tokens.end() - static_cast<std::ptrdiff_t>(t.suffix)));
}

bool id_is_ancestor(const Ontology& ontology, const std::string& ancestor_id,
                    const std::string& node_id) {
  std::vector<std::string> up = ontology.ancestors_of(node_id);
  return std::find(up.begin(), up.end(), ancestor_id) != up.end();
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

LinkReport emit_links(Ontology& ontology, const std::vector<LinkEdge>& links) {
  LinkReport report;
  for (const auto& link : links) {
    const AttentionNodeRecord* src = ontology.find_canonical(normalize_text(link.src));
    const AttentionNodeRecord* dst = ontology.find_canonical(normalize_text(link.dst));
    if (src == nullptr || dst == nullptr) {
      ++report.missing_endpoints;
      continue;
    }
    EdgeRecord edge;
    edge.src = src->id;
    edge.dst = dst->id;
    edge.relation = link.relation;
    edge.weight = link.weight;
    edge.provenance = link.rule;
    EdgeResult result = ontology.add_edge(edge);
    if (result.accepted) {
      ++report.accepted;
    } else {
      ++report.rejected;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Category links.

void CategoryLinkStats::validate() const {
  if (n_p < 0) throw DataError("category stats: n_p must be nonnegative");
  std::int64_t sum = 0;
  for (const auto& [category, count] : n_pg) {
    if (count < 0) {
      throw DataError("category stats: negative count for " + category);
    }
    sum += count;
  }
  if (sum > n_p) {
    throw DataError("category stats: per-category counts exceed the total");
  }
}

std::vector<std::pair<std::string, double>> link_attention_category(
    const CategoryLinkStats& stats, double delta_g) {
  stats.validate();
  if (stats.n_p < 1) {
    throw DataError("category linking requires at least one clicked doc");
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [category, count] : stats.n_pg) {
    double p = static_cast<double>(count) / static_cast<double>(stats.n_p);
    if (p > delta_g) out.emplace_back(category, p);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

CategoryLinkStats category_stats_for_phrase(const AttentionPhrase& phrase,
                                            const ClickGraph& graph) {
  CategoryLinkStats stats;
  std::set<std::string> seen_docs;
  for (const auto& query : graph.queries()) {
    if (!is_contiguous_subsequence(phrase.tokens, text_tokens(query.text))) {
      continue;
    }
    for (std::size_t ei : graph.query_edges(query.id)) {
      const std::string& did = graph.edges()[ei].doc_id;
      if (!seen_docs.insert(did).second) continue;
      ++stats.n_p;
      const DocRecord& doc = graph.doc(did);
      if (doc.category.has_value()) ++stats.n_pg[*doc.category];
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// isA / involve rules.

std::vector<LinkEdge> link_isa_between_attentions(
    const std::vector<AttentionPhrase>& phrases, const Ontology& ontology) {
  std::vector<LinkEdge> out;
  std::set<std::pair<std::string, std::string>> seen;
  auto emit = [&](const AttentionPhrase& parent, const AttentionPhrase& child,
                  const char* rule) {
    if (parent.text == child.text) return;
    if (!seen.insert({parent.text, child.text}).second) return;
    out.push_back(LinkEdge{parent.text, child.text, Relation::IsA, 1.0, rule});
  };
  auto broad = [](const AttentionPhrase& p) {
    return p.kind == PhraseKind::Event || p.kind == PhraseKind::Topic;
  };
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    for (std::size_t j = i + 1; j < phrases.size(); ++j) {
      const AttentionPhrase& a = phrases[i];
      const AttentionPhrase& b = phrases[j];
      if (a.kind == PhraseKind::Concept && b.kind == PhraseKind::Concept) {
        if (is_proper_token_suffix(a.tokens, b.tokens)) {
          emit(a, b, "suffix");
        } else if (is_proper_token_suffix(b.tokens, a.tokens)) {
          emit(b, a, "suffix");
        }
        continue;
      }
      if (!broad(a) || !broad(b)) continue;
      if (auto split = split_template(a.tokens, b.tokens)) {
        const AttentionNodeRecord* fa =
            ontology.find_canonical(middle_text(a.tokens, *split));
        const AttentionNodeRecord* fb =
            ontology.find_canonical(middle_text(b.tokens, *split));
        if (fa != nullptr && fb != nullptr) {
          if (id_is_ancestor(ontology, fa->id, fb->id)) {
            emit(a, b, "pattern");
          } else if (id_is_ancestor(ontology, fb->id, fa->id)) {
            emit(b, a, "pattern");
          }
        }
      }
      if (a.kind == PhraseKind::Event && b.kind == PhraseKind::Event) {
        if (a.tokens.size() < b.tokens.size() &&
            is_contiguous_subsequence(a.tokens, b.tokens)) {
          emit(a, b, "containment");
        } else if (b.tokens.size() < a.tokens.size() &&
                   is_contiguous_subsequence(b.tokens, a.tokens)) {
          emit(b, a, "containment");
        }
      }
    }
  }
  return out;
}

std::vector<LinkEdge> link_involve_concept_topic(
    const std::vector<AttentionPhrase>& concepts,
    const std::vector<AttentionPhrase>& topics) {
  std::vector<LinkEdge> out;
  for (const auto& topic : topics) {
    for (const auto& phrase : concepts) {
      if (phrase.text == topic.text) continue;
      if (!is_contiguous_subsequence(phrase.tokens, topic.tokens)) continue;
      out.push_back(LinkEdge{topic.text, phrase.text, Relation::Involve, 1.0,
                             "containment"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Concept-entity evidence.

std::vector<SessionRecord> load_session_log(const std::string& path) {
  std::vector<SessionRecord> out;
  read_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    std::string ctx = path + ":" + std::to_string(line_no);
    SessionRecord r;
    r.user = require_string(rec, "user", ctx);
    r.time = require_int(rec, "time", ctx);
    r.query = require_string(rec, "query", ctx);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<std::vector<SessionRecord>> sessionize(
    std::vector<SessionRecord> records, std::int64_t gap_seconds) {
  std::map<std::string, std::vector<SessionRecord>> by_user;
  for (auto& r : records) by_user[r.user].push_back(std::move(r));
  std::vector<std::vector<SessionRecord>> sessions;
  for (auto& [user, rs] : by_user) {
    (void)user;
    std::stable_sort(rs.begin(), rs.end(),
                     [](const SessionRecord& a, const SessionRecord& b) {
                       return a.time < b.time;
                     });
    std::vector<SessionRecord> current;
    for (auto& r : rs) {
      if (!current.empty() && r.time - current.back().time > gap_seconds) {
        sessions.push_back(std::move(current));
        current.clear();
      }
      current.push_back(std::move(r));
    }
    if (!current.empty()) sessions.push_back(std::move(current));
  }
  return sessions;
}

std::vector<ConceptEntityExample> build_concept_entity_dataset(
    const ClickGraph& graph, const std::vector<SessionRecord>& sessions,
    const Ontology& ontology, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ConceptEntityExample> out;

  // Entity inventory with pre-split tokens, in store order.
  std::vector<std::pair<std::string, std::vector<std::string>>> entities;
  for (const auto& node : ontology.nodes()) {
    if (node.kind == NodeKind::Entity) {
      entities.emplace_back(node.canonical, text_tokens(node.canonical));
    }
  }
  auto entities_in = [&](const std::vector<std::string>& tokens) {
    std::vector<std::string> found;
    for (const auto& [canonical, etoks] : entities) {
      if (is_contiguous_subsequence(etoks, tokens)) found.push_back(canonical);
    }
    return found;
  };

  // Consecutive-query positives.
  for (const auto& session : sessionize(sessions)) {
    for (std::size_t i = 0; i + 1 < session.size(); ++i) {
      std::string first = normalize_text(session[i].query);
      const AttentionNodeRecord* concept_node =
          ontology.find(NodeKind::Concept, first);
      if (concept_node == nullptr) continue;
      std::string second = normalize_text(session[i + 1].query);
      for (const auto& entity : entities_in(text_tokens(second))) {
        ConceptEntityExample ex;
        ex.concept_phrase = concept_node->canonical;
        ex.entity = entity;
        ex.context = first + " " + second;
        ex.positive = true;
        ex.provenance = "consecutive-query";
        out.push_back(std::move(ex));
      }
    }
  }

  // Clicked-doc positives, each paired with a sibling-entity negative when a
  // sibling exists.
  for (const auto& query : graph.queries()) {
    std::string qnorm = normalize_text(query.text);
    const AttentionNodeRecord* concept_node = ontology.find(NodeKind::Concept, qnorm);
    if (concept_node == nullptr) continue;
    for (std::size_t ei : graph.query_edges(query.id)) {
      const DocRecord& doc = graph.doc(graph.edges()[ei].doc_id);
      std::string context = normalize_text(
          doc.content_head.has_value() ? doc.title + " " + *doc.content_head
                                       : doc.title);
      std::vector<std::string> ctx_tokens = text_tokens(context);
      for (const auto& entity : entities_in(ctx_tokens)) {
        ConceptEntityExample ex;
        ex.concept_phrase = concept_node->canonical;
        ex.entity = entity;
        ex.context = context;
        ex.positive = true;
        ex.provenance = "clicked-doc";
        out.push_back(ex);

        const AttentionNodeRecord* entity_node = ontology.find_canonical(entity);
        if (entity_node == nullptr) continue;
        std::vector<std::string> parents = ontology.parents_of(entity_node->id);
        std::set<std::string> siblings;
        for (const auto& parent : parents) {
          for (const auto& child : ontology.children_of(parent)) {
            if (child == entity_node->id) continue;
            const AttentionNodeRecord& sib = ontology.node(child);
            if (sib.kind != NodeKind::Entity) continue;
            if (is_contiguous_subsequence(text_tokens(sib.canonical), ctx_tokens)) {
              continue;  // already mentioned, not a clean negative
            }
            siblings.insert(sib.canonical);
          }
        }
        if (siblings.empty()) continue;
        std::vector<std::string> pool(siblings.begin(), siblings.end());
        const std::string& injected = pool[rng.below(pool.size())];
        std::size_t pos = static_cast<std::size_t>(rng.below(ctx_tokens.size() + 1));
        std::vector<std::string> spliced;
        spliced.reserve(ctx_tokens.size() + 2);
        spliced.insert(spliced.end(), ctx_tokens.begin(),
                       ctx_tokens.begin() + static_cast<std::ptrdiff_t>(pos));
        for (const auto& tok : text_tokens(injected)) spliced.push_back(tok);
        spliced.insert(spliced.end(),
                       ctx_tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                       ctx_tokens.end());
        ConceptEntityExample neg;
        neg.concept_phrase = concept_node->canonical;
        neg.entity = injected;
        neg.context = smart_join(spliced);
        neg.positive = false;
        neg.provenance = "synthetic-negative";
        neg.insert_pos = pos;
        out.push_back(std::move(neg));
      }
    }
  }
  return out;
}

std::pair<bool, double> classify_concept_entity(
    const ConceptEntityClassifier& classifier, const ConceptEntityExample& example) {
  if (!classifier.trained()) {
    throw DataError("concept-entity classifier has not been trained");
  }
  double s = classifier.score(example);
  return {s > 0.5, s};
}

Eigen::VectorXd LexicalLogisticClassifier::features(const ConceptEntityExample& example) {
  std::vector<std::string> ctoks = text_tokens(example.concept_phrase);
  std::vector<std::string> etoks = text_tokens(example.entity);
  std::vector<std::string> xtoks = text_tokens(example.context);
  std::set<std::string> cset(ctoks.begin(), ctoks.end());
  std::set<std::string> eset(etoks.begin(), etoks.end());

  std::set<std::string> shared;
  std::set<std::string> all(cset.begin(), cset.end());
  all.insert(eset.begin(), eset.end());
  for (const auto& t : cset) {
    if (eset.count(t) > 0) shared.insert(t);
  }
  double jaccard = all.empty() ? 0.0
                               : static_cast<double>(shared.size()) /
                                     static_cast<double>(all.size());
  double entity_in = is_contiguous_subsequence(etoks, xtoks) ? 1.0 : 0.0;
  double concept_in = is_contiguous_subsequence(ctoks, xtoks) ? 1.0 : 0.0;
  double head_match = (!ctoks.empty() && !etoks.empty() && ctoks.back() == etoks.back())
                          ? 1.0
                          : 0.0;

  auto first_at = [&](const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > xtoks.size()) return std::string::npos;
    for (std::size_t i = 0; i + needle.size() <= xtoks.size(); ++i) {
      if (std::equal(needle.begin(), needle.end(), xtoks.begin() + static_cast<std::ptrdiff_t>(i))) {
        return i;
      }
    }
    return std::string::npos;
  };
  std::size_t cpos = first_at(ctoks);
  std::size_t epos = first_at(etoks);
  double proximity = 0.0;
  if (cpos != std::string::npos && epos != std::string::npos) {
    double gap = cpos > epos ? static_cast<double>(cpos - epos)
                             : static_cast<double>(epos - cpos);
    proximity = 1.0 / (1.0 + gap);
  }
  double pair_fraction = 0.0;
  if (!xtoks.empty()) {
    std::size_t hits = 0;
    for (const auto& t : xtoks) {
      if (all.count(t) > 0) ++hits;
    }
    pair_fraction = static_cast<double>(hits) / static_cast<double>(xtoks.size());
  }

  Eigen::VectorXd f(7);
  f << 1.0, jaccard, entity_in, concept_in, head_match, proximity, pair_fraction;
  return f;
}

void LexicalLogisticClassifier::train(const std::vector<ConceptEntityExample>& dataset) {
  if (dataset.empty()) throw DataError("classifier training set is empty");
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(dataset.size());
  for (const auto& ex : dataset) xs.push_back(features(ex));
  weights_ = Eigen::VectorXd::Zero(xs.front().size());
  double n = static_cast<double>(xs.size());
  for (std::size_t epoch = 0; epoch < epochs_; ++epoch) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(weights_.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double y = dataset[i].positive ? 1.0 : 0.0;
      grad += (sigmoid(weights_.dot(xs[i])) - y) * xs[i];
    }
    weights_ -= (learning_rate_ / n) * grad;
  }
  trained_ = true;
}

double LexicalLogisticClassifier::score(const ConceptEntityExample& example) const {
  if (!trained_) throw DataError("concept-entity classifier has not been trained");
  return sigmoid(weights_.dot(features(example)));
}

// ---------------------------------------------------------------------------
// Event elements.

ElementPrediction recognize_event_elements(const RgcnModel& model,
                                           const InteractionGraph& graph) {
  if (model.n_classes != 4) {
    throw DataError("element recognition requires a 4-class model");
  }
  std::vector<int> classes = predict_classes(rgcn_forward(model, graph));
  ElementPrediction out;
  for (const auto& node : graph.nodes) {
    if (node.seq_id < 2) continue;
    switch (classes[node.seq_id]) {
      case kClassEntity: out.entities.push_back(node.token_text); break;
      case kClassTrigger: out.triggers.push_back(node.token_text); break;
      case kClassLocation: out.locations.push_back(node.token_text); break;
      default: break;
    }
  }
  return out;
}

std::vector<LinkEdge> element_involve_edges(const std::string& event_text,
                                            const ElementPrediction& prediction) {
  std::vector<LinkEdge> out;
  auto add = [&](const std::vector<std::string>& elements) {
    for (const auto& e : elements) {
      out.push_back(LinkEdge{event_text, e, Relation::Involve, 1.0, "element"});
    }
  };
  add(prediction.entities);
  add(prediction.triggers);
  add(prediction.locations);
  return out;
}

// ---------------------------------------------------------------------------
// Entity embeddings and correlate edges.

std::size_t EntityEmbeddings::index(const std::string& name) const {
  auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) {
    throw DataError("unknown entity in embeddings: " + name);
  }
  return static_cast<std::size_t>(it - names.begin());
}

double EntityEmbeddings::distance(const std::string& a, const std::string& b) const {
  Eigen::Index ia = static_cast<Eigen::Index>(index(a));
  Eigen::Index ib = static_cast<Eigen::Index>(index(b));
  return (vectors.row(ia) - vectors.row(ib)).norm();
}

void EmbedConfig::validate() const {
  if (dim < 1) throw DataError("embedding dimension must be at least 1");
  if (margin <= 0.0) throw DataError("embedding margin must be positive");
  if (learning_rate <= 0.0) throw DataError("embedding learning rate must be positive");
}

EmbedResult train_entity_embeddings(
    const std::vector<std::pair<std::string, std::string>>& positive_pairs,
    const std::vector<std::string>& all_entities, const EmbedConfig& config) {
  config.validate();
  std::set<std::string> name_set(all_entities.begin(), all_entities.end());
  for (const auto& [a, b] : positive_pairs) {
    name_set.insert(a);
    name_set.insert(b);
  }
  EmbedResult result;
  EntityEmbeddings& emb = result.embeddings;
  emb.names.assign(name_set.begin(), name_set.end());
  emb.margin = config.margin;
  std::size_t n = emb.names.size();
  Rng rng(config.seed);
  emb.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(config.dim));
  for (Eigen::Index r = 0; r < emb.vectors.rows(); ++r) {
    for (Eigen::Index c = 0; c < emb.vectors.cols(); ++c) {
      emb.vectors(r, c) = 0.1 * rng.gaussian();
    }
  }
  if (n < 2) return result;

  // Fixed triples: each positive with its seeded negatives, self-pairs skipped.
  struct Triple {
    Eigen::Index a, b, n;
  };
  std::vector<Triple> triples;
  for (const auto& [sa, sb] : positive_pairs) {
    Eigen::Index ia = static_cast<Eigen::Index>(emb.index(sa));
    Eigen::Index ib = static_cast<Eigen::Index>(emb.index(sb));
    if (ia == ib) continue;
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(n); ++c) {
      if (c != ia && c != ib) candidates.push_back(c);
    }
    if (candidates.empty()) continue;
    for (std::size_t k = 0; k < config.negatives_per_positive; ++k) {
      triples.push_back(Triple{ia, ib, candidates[rng.below(candidates.size())]});
    }
  }
  if (triples.empty()) return result;

  auto loss_of = [&](const Eigen::MatrixXd& x) {
    double total = 0.0;
    for (const auto& t : triples) {
      double pos = (x.row(t.a) - x.row(t.b)).norm();
      double neg = (x.row(t.a) - x.row(t.n)).norm();
      double h = pos - neg + config.margin;
      if (h > 0.0) total += h;
    }
    return total;
  };
  auto grad_of = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (const auto& t : triples) {
      Eigen::RowVectorXd dab = x.row(t.a) - x.row(t.b);
      Eigen::RowVectorXd dan = x.row(t.a) - x.row(t.n);
      double pos = dab.norm();
      double neg = dan.norm();
      if (pos - neg + config.margin <= 0.0) continue;
      if (pos > 0.0) {
        Eigen::RowVectorXd u = dab / pos;
        g.row(t.a) += u;
        g.row(t.b) -= u;
      }
      if (neg > 0.0) {
        Eigen::RowVectorXd u = dan / neg;
        g.row(t.a) -= u;
        g.row(t.n) += u;
      }
    }
    return g;
  };

  double lr = config.learning_rate;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = loss_of(emb.vectors);
    result.loss_trace.push_back(loss);
    if (loss == 0.0) break;
    Eigen::MatrixXd grad = grad_of(emb.vectors);
    bool stepped = false;
    while (lr >= 1e-12) {
      Eigen::MatrixXd next = emb.vectors - lr * grad;
      if (loss_of(next) <= loss) {
        emb.vectors = std::move(next);
        stepped = true;
        break;
      }
      lr *= 0.5;
    }
    if (!stepped) break;
  }
  return result;
}

std::vector<LinkEdge> link_correlate(const EntityEmbeddings& embeddings,
                                     std::optional<double> threshold) {
  double cut = threshold.value_or(embeddings.margin / 2.0);
  std::vector<LinkEdge> out;
  for (std::size_t i = 0; i < embeddings.names.size(); ++i) {
    for (std::size_t j = i + 1; j < embeddings.names.size(); ++j) {
      double d = (embeddings.vectors.row(static_cast<Eigen::Index>(i)) -
                  embeddings.vectors.row(static_cast<Eigen::Index>(j)))
                     .norm();
      if (d < cut) {
        out.push_back(LinkEdge{embeddings.names[i], embeddings.names[j],
                               Relation::Correlate, 1.0 - d / cut, "embedding"});
      }
    }
  }
  return out;
}

}  // namespace ao
