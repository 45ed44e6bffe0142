// Shared TF-IDF statistics. One formula everywhere: tf = raw count,
// idf = ln((1+N)/(1+df)) + 1, similarity = cosine over tf*idf vectors.
#pragma once

#include <map>
#include <string>
#include <vector>

namespace ao {

class TfIdfIndex {
public:
  // Document-frequency statistics over the given token lists.
  static TfIdfIndex build(const std::vector<std::vector<std::string>>& docs);

  std::size_t n_docs() const { return n_docs_; }
  double idf(const std::string& term) const;

  // Sparse tf*idf vector for a token list.
  std::map<std::string, double> vectorize(const std::vector<std::string>& tokens) const;

  double cosine(const std::vector<std::string>& a,
                const std::vector<std::string>& b) const;

private:
  std::size_t n_docs_ = 0;
  std::map<std::string, std::size_t> df_;
};

double sparse_cosine(const std::map<std::string, double>& a,
                     const std::map<std::string, double>& b);

// Normalized primitive tokens minus punctuation; the shared tokenization for
// similarity scoring of free text.
std::vector<std::string> text_terms(const std::string& text);

}  // namespace ao
