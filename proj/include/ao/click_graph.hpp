// Bipartite search click graph: queries, documents, click-count edges, and the
// per-edge transport probabilities P(d|q) and P(q|d).
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ao/common.hpp"

namespace ao {

struct QueryRecord {
  std::string id;
  std::string text;
  std::optional<std::string> category;
};

struct DocRecord {
  std::string id;
  std::string title;
  std::optional<std::string> content_head;
  std::optional<std::string> category;
  std::optional<std::int64_t> publish_time;  // seconds since epoch
};

struct ClickEdge {
  std::string query_id;
  std::string doc_id;
  std::int64_t count = 0;  // >= 1
};

class ClickGraph {
public:
  // Adds or merges. First occurrence fixes the record text/metadata; later
  // lines for the same id only contribute counts.
  void add_query(const QueryRecord& q);
  void add_doc(const DocRecord& d);
  void add_click(const std::string& query_id, const std::string& doc_id,
                 std::int64_t count);

  bool has_query(const std::string& id) const { return query_index_.count(id) > 0; }
  bool has_doc(const std::string& id) const { return doc_index_.count(id) > 0; }
  const QueryRecord& query(const std::string& id) const;
  const DocRecord& doc(const std::string& id) const;

  const std::vector<QueryRecord>& queries() const { return queries_; }
  const std::vector<DocRecord>& docs() const { return docs_; }
  const std::vector<ClickEdge>& edges() const { return edges_; }

  // Edge indexes incident to a node (empty for isolated nodes).
  const std::vector<std::size_t>& query_edges(const std::string& query_id) const;
  const std::vector<std::size_t>& doc_edges(const std::string& doc_id) const;

  std::size_t query_count() const { return queries_.size(); }
  std::size_t doc_count() const { return docs_.size(); }

  // Positional index of a node within queries()/docs(); unknown id -> error.
  std::size_t query_pos(const std::string& id) const;
  std::size_t doc_pos(const std::string& id) const;

  // First query whose text equals `text` (normalized compare), if any.
  const QueryRecord* find_query_by_text(const std::string& text) const;

  // Total clicks per normalized query text (used as a search-count stand-in).
  std::map<std::string, std::int64_t> query_click_totals() const;

private:
  std::vector<QueryRecord> queries_;
  std::vector<DocRecord> docs_;
  std::vector<ClickEdge> edges_;
  std::unordered_map<std::string, std::size_t> query_index_;
  std::unordered_map<std::string, std::size_t> doc_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> query_adj_;
  std::unordered_map<std::string, std::vector<std::size_t>> doc_adj_;
  std::unordered_map<std::string, std::size_t> edge_index_;  // "qid\x1fdid" -> edge
};

// Per-edge transport probabilities, indexed parallel to ClickGraph::edges().
struct TransitionModel {
  std::vector<double> p_doc_given_query;
  std::vector<double> p_query_given_doc;
};

// Click-log JSONL schema:
//   {"query": str, "query_id": str, "doc_id": str, "title": str,
//    "content_head": str?, "click_count": int, "category": str?,
//    "publish_time": int?}
// Duplicate (query_id, doc_id) lines merge by summing counts.
ClickGraph load_click_log(const std::string& path);

// One line per edge in the same schema, sorted by (query_id, doc_id); loading
// the result reproduces the graph up to edge-multiset equality.
void save_click_graph(const ClickGraph& graph, const std::string& path);

// Eq. ratios c(q,d)/sum over the node's incident counts; every node with at
// least one edge gets a probability row summing to 1.
TransitionModel transport_probabilities(const ClickGraph& graph);

}  // namespace ao
