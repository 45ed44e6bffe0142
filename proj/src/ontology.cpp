#include "ao/ontology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <tuple>

#include "ao/jsonl.hpp"

namespace ao {
namespace {

std::size_t rel_index(Relation r) { return static_cast<std::size_t>(r); }

bool dag_relation(Relation r) {
  return r == Relation::IsA || r == Relation::Involve;
}

}  // namespace

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Category: return "category";
    case NodeKind::Concept: return "concept";
    case NodeKind::Entity: return "entity";
    case NodeKind::Event: return "event";
    case NodeKind::Topic: return "topic";
  }
  return "concept";
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::IsA: return "isA";
    case Relation::Involve: return "involve";
    case Relation::Correlate: return "correlate";
  }
  return "isA";
}

NodeKind node_kind_from_name(const std::string& s) {
  if (s == "category") return NodeKind::Category;
  if (s == "concept") return NodeKind::Concept;
  if (s == "entity") return NodeKind::Entity;
  if (s == "event") return NodeKind::Event;
  if (s == "topic") return NodeKind::Topic;
  throw DataError("unknown node kind: " + s);
}

Relation relation_from_name(const std::string& s) {
  if (s == "isA") return Relation::IsA;
  if (s == "involve") return Relation::Involve;
  if (s == "correlate") return Relation::Correlate;
  throw DataError("unknown relation: " + s);
}

std::string Ontology::upsert_node(const AttentionNodeRecord& record) {
  std::string canonical = normalize_text(record.canonical);
  if (canonical.empty()) throw DataError("node canonical text must be nonempty");

  auto found = by_canonical_.find(canonical);
  if (found != by_canonical_.end()) {
    AttentionNodeRecord& existing = nodes_[found->second];
    if (existing.kind != record.kind) {
      throw DataError("kind conflict for canonical \"" + canonical + "\": " +
                      node_kind_name(existing.kind) + " vs " +
                      node_kind_name(record.kind));
    }
    if (!record.id.empty() && record.id != existing.id) {
      throw DataError("id conflict for canonical \"" + canonical + "\"");
    }
    for (const auto& alias : record.aliases) {
      if (std::find(existing.aliases.begin(), existing.aliases.end(), alias) ==
          existing.aliases.end()) {
        existing.aliases.push_back(alias);
      }
    }
    existing.support_count += record.support_count;
    if (existing.attributes.empty() && !record.attributes.empty()) {
      existing.attributes = record.attributes;
    } else {
      if (existing.attributes.trigger.empty()) {
        existing.attributes.trigger = record.attributes.trigger;
      }
      if (existing.attributes.location.empty()) {
        existing.attributes.location = record.attributes.location;
      }
      if (!existing.attributes.time.has_value()) {
        existing.attributes.time = record.attributes.time;
      }
      for (const auto& e : record.attributes.entities) {
        if (std::find(existing.attributes.entities.begin(),
                      existing.attributes.entities.end(),
                      e) == existing.attributes.entities.end()) {
          existing.attributes.entities.push_back(e);
        }
      }
    }
    return existing.id;
  }

  AttentionNodeRecord fresh = record;
  fresh.canonical = canonical;
  if (fresh.id.empty()) {
    fresh.id = "n" + std::to_string(next_id_++);
  } else {
    if (by_id_.count(fresh.id) > 0) {
      throw DataError("node id already in use: " + fresh.id);
    }
    // Keep the id counter ahead of any numeric id supplied by a loader.
    if (fresh.id.size() > 1 && fresh.id[0] == 'n') {
      bool numeric = true;
      for (std::size_t i = 1; i < fresh.id.size(); ++i) {
        numeric = numeric && fresh.id[i] >= '0' && fresh.id[i] <= '9';
      }
      if (numeric) {
        std::size_t v = std::stoull(fresh.id.substr(1));
        next_id_ = std::max(next_id_, v + 1);
      }
    }
  }
  by_id_[fresh.id] = nodes_.size();
  by_canonical_[canonical] = nodes_.size();
  nodes_.push_back(std::move(fresh));
  return nodes_.back().id;
}

std::string Ontology::edge_key(const std::string& src, const std::string& dst,
                               Relation rel) {
  return src + '\x1f' + dst + '\x1f' + relation_name(rel);
}

bool Ontology::would_close_cycle(const std::string& src, const std::string& dst) const {
  // Adding src -> dst closes a cycle iff src is reachable from dst over the
  // existing isA and involve edges.
  std::deque<std::string> frontier{dst};
  std::set<std::string> seen{dst};
  while (!frontier.empty()) {
    std::string cur = frontier.front();
    frontier.pop_front();
    if (cur == src) return true;
    for (Relation rel : {Relation::IsA, Relation::Involve}) {
      auto it = out_[rel_index(rel)].find(cur);
      if (it == out_[rel_index(rel)].end()) continue;
      for (std::size_t ei : it->second) {
        const std::string& next = edges_[ei].dst;
        if (seen.insert(next).second) frontier.push_back(next);
      }
    }
  }
  return false;
}

EdgeResult Ontology::add_edge(const EdgeRecord& edge) {
  if (!has_node(edge.src)) throw DataError("edge source missing: " + edge.src);
  if (!has_node(edge.dst)) throw DataError("edge target missing: " + edge.dst);
  if (!(edge.weight > 0.0 && edge.weight <= 1.0)) {
    throw DataError("edge weight must lie in (0,1]");
  }
  if (edge.src == edge.dst) return EdgeResult{false, "self-edge"};

  EdgeRecord stored = edge;
  if (stored.relation == Relation::Correlate && stored.dst < stored.src) {
    std::swap(stored.src, stored.dst);
  }
  std::string key = edge_key(stored.src, stored.dst, stored.relation);
  if (edge_keys_.count(key) > 0) return EdgeResult{false, "duplicate"};
  if (dag_relation(stored.relation) && would_close_cycle(stored.src, stored.dst)) {
    return EdgeResult{false, "cycle: " + stored.dst + " already reaches " + stored.src};
  }

  std::size_t idx = edges_.size();
  edge_keys_.insert(key);
  out_[rel_index(stored.relation)][stored.src].push_back(idx);
  in_[rel_index(stored.relation)][stored.dst].push_back(idx);
  edges_.push_back(std::move(stored));
  return EdgeResult{true, ""};
}

const AttentionNodeRecord& Ontology::node(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw DataError("unknown node id: " + id);
  return nodes_[it->second];
}

const AttentionNodeRecord* Ontology::find(NodeKind kind,
                                          const std::string& canonical) const {
  const AttentionNodeRecord* rec = find_canonical(canonical);
  return rec != nullptr && rec->kind == kind ? rec : nullptr;
}

const AttentionNodeRecord* Ontology::find_canonical(const std::string& canonical) const {
  auto it = by_canonical_.find(normalize_text(canonical));
  return it == by_canonical_.end() ? nullptr : &nodes_[it->second];
}

std::vector<std::string> Ontology::traverse(const std::string& id,
                                            std::optional<Relation> filter,
                                            TraverseDirection direction,
                                            std::size_t depth) const {
  if (!has_node(id)) throw DataError("unknown node id: " + id);
  std::vector<std::string> result;
  std::set<std::string> seen{id};
  std::vector<std::string> level{id};

  auto relation_selected = [&](Relation r) {
    return !filter.has_value() || *filter == r;
  };

  for (std::size_t d = 0; d < depth && !level.empty(); ++d) {
    std::set<std::string> next;
    for (const auto& cur : level) {
      for (Relation rel : {Relation::IsA, Relation::Involve, Relation::Correlate}) {
        if (!relation_selected(rel)) continue;
        bool follow_out = direction != TraverseDirection::In || rel == Relation::Correlate;
        bool follow_in = direction != TraverseDirection::Out || rel == Relation::Correlate;
        if (follow_out) {
          auto it = out_[rel_index(rel)].find(cur);
          if (it != out_[rel_index(rel)].end()) {
            for (std::size_t ei : it->second) next.insert(edges_[ei].dst);
          }
        }
        if (follow_in) {
          auto it = in_[rel_index(rel)].find(cur);
          if (it != in_[rel_index(rel)].end()) {
            for (std::size_t ei : it->second) next.insert(edges_[ei].src);
          }
        }
      }
    }
    level.clear();
    for (const auto& n : next) {
      if (seen.insert(n).second) {
        level.push_back(n);  // std::set iteration keeps levels id-sorted
        result.push_back(n);
      }
    }
  }
  return result;
}

std::vector<std::string> Ontology::children_of(const std::string& id) const {
  return traverse(id, Relation::IsA, TraverseDirection::Out, 1);
}

std::vector<std::string> Ontology::parents_of(const std::string& id) const {
  return traverse(id, Relation::IsA, TraverseDirection::In, 1);
}

std::vector<std::string> Ontology::ancestors_of(const std::string& id) const {
  return traverse(id, Relation::IsA, TraverseDirection::In,
                  std::numeric_limits<std::size_t>::max());
}

std::vector<std::pair<std::string, double>> Ontology::correlates_of(
    const std::string& id) const {
  if (!has_node(id)) throw DataError("unknown node id: " + id);
  std::vector<std::pair<std::string, double>> result;
  auto out_it = out_[rel_index(Relation::Correlate)].find(id);
  if (out_it != out_[rel_index(Relation::Correlate)].end()) {
    for (std::size_t ei : out_it->second) {
      result.emplace_back(edges_[ei].dst, edges_[ei].weight);
    }
  }
  auto in_it = in_[rel_index(Relation::Correlate)].find(id);
  if (in_it != in_[rel_index(Relation::Correlate)].end()) {
    for (std::size_t ei : in_it->second) {
      result.emplace_back(edges_[ei].src, edges_[ei].weight);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

AuditReport Ontology::audit() const {
  AuditReport report;
  std::set<std::string> keys;
  for (const auto& e : edges_) {
    if (by_id_.count(e.src) == 0) report.problems.push_back("missing src: " + e.src);
    if (by_id_.count(e.dst) == 0) report.problems.push_back("missing dst: " + e.dst);
    if (!(e.weight > 0.0 && e.weight <= 1.0)) {
      report.problems.push_back("weight out of range on " + e.src + "->" + e.dst);
    }
    if (!keys.insert(edge_key(e.src, e.dst, e.relation)).second) {
      report.problems.push_back("duplicate edge " + e.src + "->" + e.dst);
    }
  }

  // Kahn's algorithm over isA and involve; leftovers sit on a cycle.
  std::map<std::string, std::size_t> indegree;
  for (const auto& n : nodes_) indegree[n.id] = 0;
  for (const auto& e : edges_) {
    if (dag_relation(e.relation)) indegree[e.dst] += 1;
  }
  std::deque<std::string> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push_back(id);
  }
  std::size_t processed = 0;
  while (!ready.empty()) {
    std::string cur = ready.front();
    ready.pop_front();
    ++processed;
    for (Relation rel : {Relation::IsA, Relation::Involve}) {
      auto it = out_[rel_index(rel)].find(cur);
      if (it == out_[rel_index(rel)].end()) continue;
      for (std::size_t ei : it->second) {
        if (--indegree[edges_[ei].dst] == 0) ready.push_back(edges_[ei].dst);
      }
    }
  }
  if (processed != nodes_.size()) {
    for (const auto& [id, deg] : indegree) {
      if (deg > 0) report.problems.push_back("node on isA/involve cycle: " + id);
    }
  }
  return report;
}

void save_ontology(const Ontology& ontology, const std::string& path) {
  std::vector<Json> lines;
  lines.push_back(Json{{"rec", "header"},
                       {"format", "attention-ontology"},
                       {"version", 1}});
  for (const auto& n : ontology.nodes()) {
    Json j{{"rec", "node"},
           {"id", n.id},
           {"kind", node_kind_name(n.kind)},
           {"canonical", n.canonical},
           {"aliases", n.aliases},
           {"support", n.support_count}};
    if (!n.attributes.empty()) {
      Json attrs = Json::object();
      if (!n.attributes.entities.empty()) attrs["entities"] = n.attributes.entities;
      if (!n.attributes.trigger.empty()) attrs["trigger"] = n.attributes.trigger;
      if (n.attributes.time.has_value()) attrs["time"] = *n.attributes.time;
      if (!n.attributes.location.empty()) attrs["location"] = n.attributes.location;
      j["attributes"] = attrs;
    }
    lines.push_back(std::move(j));
  }
  for (const auto& e : ontology.edges()) {
    lines.push_back(Json{{"rec", "edge"},
                         {"src", e.src},
                         {"dst", e.dst},
                         {"relation", relation_name(e.relation)},
                         {"weight", e.weight},
                         {"provenance", e.provenance}});
  }
  write_jsonl(path, lines);
}

Ontology load_ontology(const std::string& path) {
  Ontology ontology;
  bool have_header = false;
  read_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    std::string ctx = path + ":" + std::to_string(line_no);
    std::string kind = require_string(rec, "rec", ctx);
    if (!have_header) {
      if (kind != "header" || rec.value("format", "") != "attention-ontology") {
        throw DataError(path, line_no, "expected attention-ontology header");
      }
      if (rec.value("version", 0) != 1) {
        throw DataError(path, line_no, "unsupported ontology version");
      }
      have_header = true;
      return;
    }
    if (kind == "node") {
      AttentionNodeRecord n;
      n.id = require_string(rec, "id", ctx);
      n.kind = node_kind_from_name(require_string(rec, "kind", ctx));
      n.canonical = require_string(rec, "canonical", ctx);
      if (rec.contains("aliases")) {
        for (const auto& a : rec.at("aliases")) n.aliases.push_back(a.get<std::string>());
      }
      n.support_count = rec.value("support", std::int64_t{0});
      if (rec.contains("attributes")) {
        const Json& attrs = rec.at("attributes");
        if (attrs.contains("entities")) {
          for (const auto& e : attrs.at("entities")) {
            n.attributes.entities.push_back(e.get<std::string>());
          }
        }
        n.attributes.trigger = attrs.value("trigger", "");
        n.attributes.location = attrs.value("location", "");
        if (attrs.contains("time")) {
          n.attributes.time = attrs.at("time").get<std::int64_t>();
        }
      }
      ontology.upsert_node(n);
    } else if (kind == "edge") {
      EdgeRecord e;
      e.src = require_string(rec, "src", ctx);
      e.dst = require_string(rec, "dst", ctx);
      e.relation = relation_from_name(require_string(rec, "relation", ctx));
      e.weight = rec.value("weight", 1.0);
      e.provenance = rec.value("provenance", "");
      EdgeResult res;
      try {
        res = ontology.add_edge(e);
      } catch (const DataError& err) {
        throw DataError(path, line_no, err.what());
      }
      if (!res.accepted) {
        throw DataError(path, line_no, "invalid edge record: " + res.reason);
      }
    } else {
      throw DataError(path, line_no, "unknown record type: " + kind);
    }
  });
  if (!have_header) throw DataError("missing ontology header in " + path);
  return ontology;
}

bool ontology_equal(const Ontology& a, const Ontology& b) {
  std::vector<AttentionNodeRecord> na = a.nodes_, nb = b.nodes_;
  auto by_id = [](const AttentionNodeRecord& x, const AttentionNodeRecord& y) {
    return x.id < y.id;
  };
  std::sort(na.begin(), na.end(), by_id);
  std::sort(nb.begin(), nb.end(), by_id);
  if (na != nb) return false;

  auto edge_tuple = [](const EdgeRecord& e) {
    return std::make_tuple(e.src, e.dst, relation_name(e.relation), e.weight,
                           e.provenance);
  };
  std::vector<std::tuple<std::string, std::string, std::string, double, std::string>>
      ea, eb;
  for (const auto& e : a.edges_) ea.push_back(edge_tuple(e));
  for (const auto& e : b.edges_) eb.push_back(edge_tuple(e));
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  return ea == eb;
}

}  // namespace ao
