// Pluggable phrase embedding. The default maps character n-grams through a
// stable hash into a fixed-width vector; production encoders plug in behind
// the same interface.
#pragma once

#include <Eigen/Dense>
#include <string>

namespace ao {

class PhraseEmbedder {
public:
  virtual ~PhraseEmbedder() = default;
  virtual Eigen::VectorXd embed(const std::string& text) const = 0;
  virtual std::size_t dim() const = 0;
};

// Counts character 2- and 3-grams of the normalized text (the whole text when
// shorter), buckets them by FNV-1a, and L2-normalizes. Deterministic across
// platforms; empty text embeds to the zero vector.
class HashedNgramEmbedder : public PhraseEmbedder {
public:
  explicit HashedNgramEmbedder(std::size_t dim = 64);

  Eigen::VectorXd embed(const std::string& text) const override;
  std::size_t dim() const override { return dim_; }

private:
  std::size_t dim_;
};

// Cosine over dense vectors; 0 when either side has zero norm.
double dense_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace ao
