// Evaluation metrics: exact-match / token-F1 / coverage for phrase
// predictions, and macro / micro / weighted F1 for multiclass labels.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ao/common.hpp"

namespace ao {

struct PhraseExampleScore {
  double em = 0.0;  // 1 when normalized texts are equal
  double f1 = 0.0;  // multiset token overlap
  bool nonempty = false;
};

struct PhraseEvalReport {
  double em = 0.0;        // mean of per-example EM
  double f1 = 0.0;        // mean of per-example F1
  double coverage = 0.0;  // nonempty predictions / total
  std::vector<PhraseExampleScore> per_example;
};

// Scores each prediction against its gold phrase. EM is equality of the
// normalized texts; F1 is the harmonic mean of precision and recall over
// multiset token overlap. An empty prediction scores 0 unless the gold is
// also empty, in which case both EM and F1 are 1. Lists must be the same
// nonzero length.
PhraseEvalReport phrase_metrics(const std::vector<std::string>& predictions,
                                const std::vector<std::string>& golds);

struct ClassScore {
  int label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

struct MulticlassReport {
  double f1_macro = 0.0;     // unweighted mean over ALL declared classes
  double f1_micro = 0.0;     // from global tp/fp/fn counts
  double f1_weighted = 0.0;  // support-weighted mean
  std::vector<ClassScore> per_class;  // declared class order
};

// Per-class F1 aggregation over single-label predictions. The class set
// declares which classes participate in the macro average; a declared class
// absent from both pred and gold contributes 0. Labels outside the class
// set, duplicate declared classes, and length mismatches are errors.
MulticlassReport multiclass_metrics(const std::vector<int>& pred,
                                    const std::vector<int>& gold,
                                    const std::vector<int>& classes);

}  // namespace ao
