#include "ao/click_graph.hpp"

#include <algorithm>

#include "ao/jsonl.hpp"

namespace ao {

namespace {
std::string edge_key(const std::string& qid, const std::string& did) {
  return qid + '\x1f' + did;
}
const std::vector<std::size_t> kNoEdges;
}  // namespace

void ClickGraph::add_query(const QueryRecord& q) {
  if (q.text.empty()) throw DataError("query " + q.id + ": empty text");
  if (query_index_.count(q.id)) return;
  query_index_[q.id] = queries_.size();
  queries_.push_back(q);
}

void ClickGraph::add_doc(const DocRecord& d) {
  if (d.title.empty()) throw DataError("doc " + d.id + ": empty title");
  if (doc_index_.count(d.id)) return;
  doc_index_[d.id] = docs_.size();
  docs_.push_back(d);
}

void ClickGraph::add_click(const std::string& query_id, const std::string& doc_id,
                           std::int64_t count) {
  if (count < 1) throw DataError("click count must be >= 1");
  if (!query_index_.count(query_id)) throw DataError("unknown query id: " + query_id);
  if (!doc_index_.count(doc_id)) throw DataError("unknown doc id: " + doc_id);
  auto key = edge_key(query_id, doc_id);
  auto it = edge_index_.find(key);
  if (it != edge_index_.end()) {
    edges_[it->second].count += count;
    return;
  }
  edge_index_[key] = edges_.size();
  query_adj_[query_id].push_back(edges_.size());
  doc_adj_[doc_id].push_back(edges_.size());
  edges_.push_back({query_id, doc_id, count});
}

const QueryRecord& ClickGraph::query(const std::string& id) const {
  auto it = query_index_.find(id);
  if (it == query_index_.end()) throw DataError("unknown query id: " + id);
  return queries_[it->second];
}

const DocRecord& ClickGraph::doc(const std::string& id) const {
  auto it = doc_index_.find(id);
  if (it == doc_index_.end()) throw DataError("unknown doc id: " + id);
  return docs_[it->second];
}

std::size_t ClickGraph::query_pos(const std::string& id) const {
  auto it = query_index_.find(id);
  if (it == query_index_.end()) throw DataError("unknown query id: " + id);
  return it->second;
}

std::size_t ClickGraph::doc_pos(const std::string& id) const {
  auto it = doc_index_.find(id);
  if (it == doc_index_.end()) throw DataError("unknown doc id: " + id);
  return it->second;
}

const std::vector<std::size_t>& ClickGraph::query_edges(const std::string& query_id) const {
  auto it = query_adj_.find(query_id);
  return it == query_adj_.end() ? kNoEdges : it->second;
}

const std::vector<std::size_t>& ClickGraph::doc_edges(const std::string& doc_id) const {
  auto it = doc_adj_.find(doc_id);
  return it == doc_adj_.end() ? kNoEdges : it->second;
}

const QueryRecord* ClickGraph::find_query_by_text(const std::string& text) const {
  std::string norm = normalize_text(text);
  for (const auto& q : queries_) {
    if (normalize_text(q.text) == norm) return &q;
  }
  return nullptr;
}

std::map<std::string, std::int64_t> ClickGraph::query_click_totals() const {
  std::map<std::string, std::int64_t> totals;
  for (const auto& e : edges_) {
    totals[normalize_text(query(e.query_id).text)] += e.count;
  }
  return totals;
}

ClickGraph load_click_log(const std::string& path) {
  ClickGraph graph;
  read_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    std::string ctx = path + ":" + std::to_string(line_no);
    QueryRecord q;
    q.id = require_string(rec, "query_id", ctx);
    q.text = require_string(rec, "query", ctx);
    if (q.text.empty()) throw DataError(path, line_no, "empty query text");
    if (rec.contains("query_category") && !rec["query_category"].is_null())
      q.category = require_string(rec, "query_category", ctx);

    DocRecord d;
    d.id = require_string(rec, "doc_id", ctx);
    d.title = require_string(rec, "title", ctx);
    if (d.title.empty()) throw DataError(path, line_no, "empty title");
    if (rec.contains("content_head") && !rec["content_head"].is_null())
      d.content_head = require_string(rec, "content_head", ctx);
    if (rec.contains("category") && !rec["category"].is_null())
      d.category = require_string(rec, "category", ctx);
    if (rec.contains("publish_time") && !rec["publish_time"].is_null())
      d.publish_time = require_int(rec, "publish_time", ctx);

    long long count = require_int(rec, "click_count", ctx);
    if (count < 1) throw DataError(path, line_no, "click_count must be >= 1");

    graph.add_query(q);
    graph.add_doc(d);
    graph.add_click(q.id, d.id, count);
  });
  return graph;
}

void save_click_graph(const ClickGraph& graph, const std::string& path) {
  std::vector<std::size_t> order(graph.edges().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = graph.edges()[a];
    const auto& eb = graph.edges()[b];
    return std::tie(ea.query_id, ea.doc_id) < std::tie(eb.query_id, eb.doc_id);
  });

  std::vector<Json> lines;
  lines.reserve(order.size());
  for (std::size_t idx : order) {
    const auto& e = graph.edges()[idx];
    const auto& q = graph.query(e.query_id);
    const auto& d = graph.doc(e.doc_id);
    Json rec{{"query", q.text},
             {"query_id", q.id},
             {"doc_id", d.id},
             {"title", d.title},
             {"click_count", e.count}};
    if (q.category) rec["query_category"] = *q.category;
    if (d.content_head) rec["content_head"] = *d.content_head;
    if (d.category) rec["category"] = *d.category;
    if (d.publish_time) rec["publish_time"] = *d.publish_time;
    lines.push_back(std::move(rec));
  }
  write_jsonl(path, lines);
}

TransitionModel transport_probabilities(const ClickGraph& graph) {
  if (graph.query_count() == 0 && graph.doc_count() == 0)
    throw DataError("transport_probabilities: empty graph");

  TransitionModel model;
  model.p_doc_given_query.assign(graph.edges().size(), 0.0);
  model.p_query_given_doc.assign(graph.edges().size(), 0.0);

  for (const auto& q : graph.queries()) {
    const auto& incident = graph.query_edges(q.id);
    double total = 0;
    for (std::size_t idx : incident) total += static_cast<double>(graph.edges()[idx].count);
    for (std::size_t idx : incident)
      model.p_doc_given_query[idx] = static_cast<double>(graph.edges()[idx].count) / total;
  }
  for (const auto& d : graph.docs()) {
    const auto& incident = graph.doc_edges(d.id);
    double total = 0;
    for (std::size_t idx : incident) total += static_cast<double>(graph.edges()[idx].count);
    for (std::size_t idx : incident)
      model.p_query_given_doc[idx] = static_cast<double>(graph.edges()[idx].count) / total;
  }
  return model;
}

}  // namespace ao
