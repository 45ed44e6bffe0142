#include "ao/embedder.hpp"

#include "ao/common.hpp"

namespace ao {

HashedNgramEmbedder::HashedNgramEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw DataError("embedder dimension must be positive");
}

Eigen::VectorXd HashedNgramEmbedder::embed(const std::string& text) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  std::string norm = normalize_text(text);
  if (norm.empty()) return v;
  std::vector<std::string> chars = utf8_chars(norm);
  auto bump = [&](const std::string& gram) {
    v(static_cast<Eigen::Index>(fnv1a64(gram) % dim_)) += 1.0;
  };
  bool any = false;
  for (std::size_t n = 2; n <= 3; ++n) {
    if (chars.size() < n) continue;
    for (std::size_t i = 0; i + n <= chars.size(); ++i) {
      std::string gram;
      for (std::size_t k = 0; k < n; ++k) gram += chars[i + k];
      bump(gram);
      any = true;
    }
  }
  if (!any) bump(norm);
  double len = v.norm();
  if (len > 0.0) v /= len;
  return v;
}

double dense_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double na = a.norm();
  double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

}  // namespace ao
