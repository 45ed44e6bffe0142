// Relational graph convolutional network with basis decomposition over
// interaction graphs. Feature embedding tables are trained jointly with the
// message-passing layers; gradients are analytic and finite-difference
// checked.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "ao/qtig.hpp"

namespace ao {

// Reserved fallback rows sit at the end of each table; unknown or out-of-range
// values land there instead of erroring.
std::size_t pos_feature_index(Pos p);
std::size_t ner_feature_index(Ner n);
std::size_t char_len_bucket(std::size_t char_len);  // 1,2,3,4,5+
std::size_t seq_id_bucket(std::size_t seq_id);      // 0..5 singletons, then log-scale

struct FeatureEncoder {
  // rows x width per table; last row of each table is the fallback.
  Eigen::MatrixXd ner;   // 6 tags + fallback
  Eigen::MatrixXd pos;   // 6 tags + fallback
  Eigen::MatrixXd stop;  // 2 flags + fallback
  Eigen::MatrixXd len;   // 5 buckets + fallback
  Eigen::MatrixXd seq;   // 11 buckets + fallback

  static FeatureEncoder init(Rng& rng, std::size_t ner_w = 8, std::size_t pos_w = 8,
                             std::size_t stop_w = 2, std::size_t len_w = 4,
                             std::size_t seq_w = 8);
  std::size_t width() const;

  // Table row indexes for one node's features, clamped to fallback rows.
  std::array<std::size_t, 5> feature_rows(const InteractionNode& node) const;
};

struct RgcnLayer {
  std::vector<Eigen::MatrixXd> bases;  // B matrices, d_out x d_in
  Eigen::MatrixXd coeff;               // R x B relation coefficients
  Eigen::MatrixXd self_weight;         // d_out x d_in

  std::size_t d_in() const { return static_cast<std::size_t>(self_weight.cols()); }
  std::size_t d_out() const { return static_cast<std::size_t>(self_weight.rows()); }
  // W_r = sum_b coeff(r,b) * bases[b].
  Eigen::MatrixXd relation_weight(std::size_t r) const;
};

struct RgcnConfig {
  std::size_t hidden = 32;
  std::size_t layers = 5;
  std::size_t bases = 5;
  std::size_t classes = 2;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 50;
  std::uint64_t seed = 1;
  double positive_threshold = 0.5;

  void validate() const;
};

struct RgcnModel {
  FeatureEncoder encoder;
  std::vector<RgcnLayer> layers;
  Eigen::MatrixXd head;  // classes x d_last, bias-free linear map
  // Label -> relation index; index 0 is the reserved unknown relation.
  std::map<std::string, std::size_t> relation_vocab;
  std::size_t n_classes = 2;

  static RgcnModel create(const RgcnConfig& config,
                          const std::vector<std::string>& relation_labels,
                          std::uint64_t seed);

  std::size_t n_relations() const { return relation_vocab.size(); }
  std::size_t relation_index(const std::string& label) const;

  // Same shapes, all parameters zero; used as a gradient accumulator.
  RgcnModel zeros_like() const;

  // Flat parameter view in a fixed order (encoder tables, layer bases,
  // coefficients, self weights, head); shared by SGD, the gradient check,
  // and checkpointing.
  std::vector<Eigen::MatrixXd*> parameter_blocks();
  std::vector<const Eigen::MatrixXd*> parameter_blocks() const;
  std::size_t parameter_count() const;
};

// Per-graph tensors reused across epochs: normalized incoming adjacency per
// relation (c_vw = |N^r(v)| over incoming edges) and per-node feature rows.
struct GraphTensors {
  std::vector<Eigen::MatrixXd> adjacency;  // one n x n matrix per relation
  std::vector<std::array<std::size_t, 5>> feature_rows;
  std::size_t n_nodes = 0;
};

GraphTensors prepare_graph(const RgcnModel& model, const InteractionGraph& graph);

// Row per node in seq_id order; width = encoder output width.
Eigen::MatrixXd encode_features(const InteractionGraph& graph,
                                const FeatureEncoder& encoder);

// Per-node class probabilities (rows sum to 1).
Eigen::MatrixXd rgcn_forward(const RgcnModel& model, const InteractionGraph& graph);

// Mean cross-entropy over nodes plus probabilities for reuse.
struct EvalResult {
  double loss = 0.0;
  Eigen::MatrixXd probs;
};
EvalResult rgcn_eval(const RgcnModel& model, const GraphTensors& tensors,
                     const std::vector<int>& labels);

struct TrainExample {
  InteractionGraph graph;
  std::vector<int> labels;  // one per node, sentinels included
};

// Full-batch within each graph, one SGD step per graph per epoch; trace holds
// the mean pre-update loss per epoch. Deterministic for a fixed model state.
std::vector<double> rgcn_train(RgcnModel& model, const std::vector<TrainExample>& dataset,
                               const TrainConfig& config);

// Max relative error between analytic and central finite-difference gradients
// over a seeded parameter sample; parameters whose perturbation flips a ReLU
// activation sign are skipped.
double gradient_check(const RgcnModel& model, const InteractionGraph& graph,
                      const std::vector<int>& labels, std::size_t sample_size,
                      std::uint64_t seed, double step = 1e-5);

// Versioned JSON checkpoint; round-trips parameters exactly.
void save_rgcn(const RgcnModel& model, const std::string& path);
RgcnModel load_rgcn(const std::string& path);

// Argmax class per node; ties resolve to the lowest class index.
std::vector<int> predict_classes(const Eigen::MatrixXd& probs);

}  // namespace ao
