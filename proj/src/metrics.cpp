#include "ao/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ao/tfidf.hpp"

namespace ao {

namespace {

double token_f1(const std::vector<std::string>& pred,
                const std::vector<std::string>& gold) {
  std::map<std::string, std::size_t> gold_counts;
  for (const auto& t : gold) gold_counts[t] += 1;
  std::size_t common = 0;
  for (const auto& t : pred) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      it->second -= 1;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  double recall = static_cast<double>(common) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

PhraseEvalReport phrase_metrics(const std::vector<std::string>& predictions,
                                const std::vector<std::string>& golds) {
  if (predictions.size() != golds.size()) {
    throw DataError("prediction and gold counts differ");
  }
  if (predictions.empty()) throw DataError("no examples to score");

  PhraseEvalReport report;
  report.per_example.reserve(predictions.size());
  std::size_t nonempty = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    std::string p = normalize_text(predictions[i]);
    std::string g = normalize_text(golds[i]);
    PhraseExampleScore score;
    score.nonempty = !p.empty();
    if (p.empty() && g.empty()) {
      score.em = 1.0;
      score.f1 = 1.0;
    } else if (!p.empty() && !g.empty()) {
      score.em = (p == g) ? 1.0 : 0.0;
      score.f1 = token_f1(text_terms(p), text_terms(g));
    }
    if (score.nonempty) ++nonempty;
    report.em += score.em;
    report.f1 += score.f1;
    report.per_example.push_back(score);
  }
  double n = static_cast<double>(predictions.size());
  report.em /= n;
  report.f1 /= n;
  report.coverage = static_cast<double>(nonempty) / n;
  return report;
}

MulticlassReport multiclass_metrics(const std::vector<int>& pred,
                                    const std::vector<int>& gold,
                                    const std::vector<int>& classes) {
  if (pred.size() != gold.size()) {
    throw DataError("prediction and gold counts differ");
  }
  if (classes.empty()) throw DataError("class set must not be empty");
  std::set<int> declared(classes.begin(), classes.end());
  if (declared.size() != classes.size()) {
    throw DataError("duplicate class in class set");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (declared.count(pred[i]) == 0) {
      throw DataError("prediction label outside class set: " + std::to_string(pred[i]));
    }
    if (declared.count(gold[i]) == 0) {
      throw DataError("gold label outside class set: " + std::to_string(gold[i]));
    }
  }

  std::map<int, std::size_t> tp;
  std::map<int, std::size_t> fp;
  std::map<int, std::size_t> fn;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == gold[i]) {
      tp[pred[i]] += 1;
    } else {
      fp[pred[i]] += 1;
      fn[gold[i]] += 1;
    }
  }

  MulticlassReport report;
  std::size_t tp_total = 0;
  std::size_t fp_total = 0;
  std::size_t fn_total = 0;
  std::size_t support_total = 0;
  double weighted_sum = 0.0;
  for (int label : classes) {
    ClassScore score;
    score.label = label;
    std::size_t t = tp.count(label) ? tp[label] : 0;
    std::size_t p = fp.count(label) ? fp[label] : 0;
    std::size_t n = fn.count(label) ? fn[label] : 0;
    score.support = t + n;
    if (t + p > 0) score.precision = static_cast<double>(t) / static_cast<double>(t + p);
    if (t + n > 0) score.recall = static_cast<double>(t) / static_cast<double>(t + n);
    if (score.precision + score.recall > 0.0) {
      score.f1 = 2.0 * score.precision * score.recall /
                 (score.precision + score.recall);
    }
    report.f1_macro += score.f1;
    weighted_sum += static_cast<double>(score.support) * score.f1;
    tp_total += t;
    fp_total += p;
    fn_total += n;
    support_total += score.support;
    report.per_class.push_back(score);
  }
  report.f1_macro /= static_cast<double>(classes.size());
  if (support_total > 0) {
    report.f1_weighted = weighted_sum / static_cast<double>(support_total);
  }
  double micro_p = (tp_total + fp_total > 0)
                       ? static_cast<double>(tp_total) / static_cast<double>(tp_total + fp_total)
                       : 0.0;
  double micro_r = (tp_total + fn_total > 0)
                       ? static_cast<double>(tp_total) / static_cast<double>(tp_total + fn_total)
                       : 0.0;
  if (micro_p + micro_r > 0.0) {
    report.f1_micro = 2.0 * micro_p * micro_r / (micro_p + micro_r);
  }
  return report;
}

}  // namespace ao
