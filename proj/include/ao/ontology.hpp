// In-memory attention ontology with JSONL persistence: typed nodes, typed
// weighted edges, DAG enforcement over isA/involve, BFS traversal.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ao/common.hpp"

namespace ao {

enum class NodeKind { Category, Concept, Entity, Event, Topic };
enum class Relation { IsA, Involve, Correlate };

const char* node_kind_name(NodeKind k);
const char* relation_name(Relation r);
NodeKind node_kind_from_name(const std::string& s);
Relation relation_from_name(const std::string& s);

struct EventAttributes {
  std::vector<std::string> entities;
  std::string trigger;
  std::optional<std::int64_t> time;  // earliest article publication time
  std::string location;

  bool empty() const {
    return entities.empty() && trigger.empty() && !time.has_value() &&
           location.empty();
  }
  bool operator==(const EventAttributes&) const = default;
};

struct AttentionNodeRecord {
  std::string id;  // assigned by the store when empty
  NodeKind kind = NodeKind::Concept;
  std::string canonical;  // normalized phrase text
  std::vector<std::string> aliases;
  EventAttributes attributes;
  std::int64_t support_count = 0;

  bool operator==(const AttentionNodeRecord&) const = default;
};

struct EdgeRecord {
  std::string src;
  std::string dst;
  Relation relation = Relation::IsA;  // isA runs parent -> child
  double weight = 1.0;                // in (0,1]
  std::string provenance;

  bool operator==(const EdgeRecord&) const = default;
};

struct EdgeResult {
  bool accepted = false;
  std::string reason;  // empty when accepted
};

enum class TraverseDirection { Out, In, Both };

struct AuditReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

class Ontology {
public:
  // New node, or alias/stat merge into the node with the same kind+canonical.
  // The same canonical under a different kind is an error.
  std::string upsert_node(const AttentionNodeRecord& record);

  // isA/involve edges that would close a directed cycle are rejected, as are
  // duplicates (correlate duplicates match either orientation). Correlate
  // edges are stored once in canonical id order. Missing endpoints error.
  EdgeResult add_edge(const EdgeRecord& edge);

  bool has_node(const std::string& id) const { return by_id_.count(id) > 0; }
  const AttentionNodeRecord& node(const std::string& id) const;
  const AttentionNodeRecord* find(NodeKind kind, const std::string& canonical) const;
  const AttentionNodeRecord* find_canonical(const std::string& canonical) const;

  const std::vector<AttentionNodeRecord>& nodes() const { return nodes_; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }

  // BFS from `id` (excluded), levels sorted by node id, deduplicated,
  // depth-limited. Correlate edges always traverse both ways; for isA and
  // involve, Out follows src->dst (parent to child for isA).
  std::vector<std::string> traverse(const std::string& id,
                                    std::optional<Relation> filter,
                                    TraverseDirection direction,
                                    std::size_t depth) const;

  std::vector<std::string> children_of(const std::string& id) const;
  std::vector<std::string> parents_of(const std::string& id) const;
  std::vector<std::string> ancestors_of(const std::string& id) const;
  // Correlate neighbors with weights, queried symmetrically.
  std::vector<std::pair<std::string, double>> correlates_of(const std::string& id) const;

  // Full recheck: endpoint existence, weight ranges, duplicate edges,
  // isA/involve acyclicity.
  AuditReport audit() const;

private:
  bool would_close_cycle(const std::string& src, const std::string& dst) const;
  static std::string edge_key(const std::string& src, const std::string& dst,
                              Relation rel);

  std::vector<AttentionNodeRecord> nodes_;
  std::vector<EdgeRecord> edges_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::string, std::size_t> by_canonical_;  // canonical -> node index
  std::set<std::string> edge_keys_;
  // Directed adjacency for isA/involve cycle checks and traversal:
  // out_[relation index][node id] -> edge indexes.
  std::array<std::unordered_map<std::string, std::vector<std::size_t>>, 3> out_;
  std::array<std::unordered_map<std::string, std::vector<std::size_t>>, 3> in_;
  std::size_t next_id_ = 1;

  friend bool ontology_equal(const Ontology& a, const Ontology& b);
};

// JSONL persistence: versioned header line, then node records, then edge
// records. Node ids are stable across a round trip.
void save_ontology(const Ontology& ontology, const std::string& path);
Ontology load_ontology(const std::string& path);

// Structural equality: same node set (by value) and same edge multiset.
bool ontology_equal(const Ontology& a, const Ontology& b);

}  // namespace ao
