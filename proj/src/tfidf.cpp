#include "ao/tfidf.hpp"

#include <cmath>
#include <set>

#include "ao/annotate.hpp"

namespace ao {

TfIdfIndex TfIdfIndex::build(const std::vector<std::vector<std::string>>& docs) {
  TfIdfIndex index;
  index.n_docs_ = docs.size();
  for (const auto& doc : docs) {
    std::set<std::string> seen(doc.begin(), doc.end());
    for (const auto& term : seen) index.df_[term] += 1;
  }
  return index;
}

double TfIdfIndex::idf(const std::string& term) const {
  auto it = df_.find(term);
  double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + df)) + 1.0;
}

std::map<std::string, double> TfIdfIndex::vectorize(
    const std::vector<std::string>& tokens) const {
  std::map<std::string, std::size_t> tf;
  for (const auto& t : tokens) tf[t] += 1;
  std::map<std::string, double> vec;
  for (const auto& [term, count] : tf) {
    vec[term] = static_cast<double>(count) * idf(term);
  }
  return vec;
}

double TfIdfIndex::cosine(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) const {
  return sparse_cosine(vectorize(a), vectorize(b));
}

double sparse_cosine(const std::map<std::string, double>& a,
                     const std::map<std::string, double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [term, va] : a) {
    na += va * va;
    auto it = b.find(term);
    if (it != b.end()) dot += va * it->second;
  }
  for (const auto& [term, vb] : b) nb += vb * vb;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::string> text_terms(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& tok : primitive_tokens(normalize_text(text))) {
    if (!is_punct_char(tok)) out.push_back(tok);
  }
  return out;
}

}  // namespace ao
