#include "ao/rgcn.hpp"

#include <algorithm>
#include <cmath>

#include "ao/jsonl.hpp"

namespace ao {
namespace {

Eigen::MatrixXd gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                                double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rng.gaussian() * scale;
    }
  }
  return m;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    double mx = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - mx).exp();
    probs.row(i) = (e / e.sum()).matrix();
  }
  return probs;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw DataError("checkpoint: bad matrix " + what);
  std::size_t rows = j.size();
  std::size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw DataError("checkpoint: ragged matrix " + what);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          j[i][c].get<double>();
    }
  }
  return m;
}

// Forward pass state kept for backpropagation.
struct ForwardCache {
  Eigen::MatrixXd X;
  std::vector<Eigen::MatrixXd> H;               // H[0] = X, H[l+1] = ReLU(S[l])
  std::vector<Eigen::MatrixXd> S;               // pre-activations
  std::vector<std::vector<Eigen::MatrixXd>> G;  // G[l][r] = M_r * H[l]
  Eigen::MatrixXd logits;
  Eigen::MatrixXd probs;
};

Eigen::MatrixXd features_from_rows(const RgcnModel& model,
                                   const GraphTensors& tensors) {
  const FeatureEncoder& enc = model.encoder;
  std::size_t n = tensors.n_nodes;
  Eigen::MatrixXd X(n, enc.width());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rows = tensors.feature_rows[i];
    Eigen::Index off = 0;
    const Eigen::MatrixXd* tables[5] = {&enc.ner, &enc.pos, &enc.stop, &enc.len,
                                        &enc.seq};
    for (std::size_t t = 0; t < 5; ++t) {
      Eigen::Index w = tables[t]->cols();
      X.row(static_cast<Eigen::Index>(i)).segment(off, w) =
          tables[t]->row(static_cast<Eigen::Index>(rows[t]));
      off += w;
    }
  }
  return X;
}

void forward_cached(const RgcnModel& model, const GraphTensors& tensors,
                    ForwardCache& cache) {
  cache.X = features_from_rows(model, tensors);
  cache.H.assign(1, cache.X);
  cache.S.clear();
  cache.G.clear();
  std::size_t R = model.n_relations();
  for (const RgcnLayer& layer : model.layers) {
    const Eigen::MatrixXd& H = cache.H.back();
    if (static_cast<std::size_t>(H.cols()) != layer.d_in()) {
      throw InvariantError("layer input width mismatch");
    }
    std::vector<Eigen::MatrixXd> G;
    G.reserve(R);
    Eigen::MatrixXd S = H * layer.self_weight.transpose();
    for (std::size_t r = 0; r < R; ++r) {
      G.push_back(tensors.adjacency[r] * H);
      S.noalias() += G.back() * layer.relation_weight(r).transpose();
    }
    cache.G.push_back(std::move(G));
    cache.S.push_back(S);
    cache.H.push_back(S.cwiseMax(0.0));
  }
  cache.logits = cache.H.back() * model.head.transpose();
  cache.probs = softmax_rows(cache.logits);
}

double mean_cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    double p = probs(i, labels[static_cast<std::size_t>(i)]);
    total += -std::log(std::max(p, 1e-300));
  }
  return total / static_cast<double>(probs.rows());
}

void check_labels(const RgcnModel& model, std::size_t n_nodes,
                  const std::vector<int>& labels) {
  if (labels.size() != n_nodes) {
    throw DataError("label count " + std::to_string(labels.size()) +
                    " does not match node count " + std::to_string(n_nodes));
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= model.n_classes) {
      throw DataError("label out of range: " + std::to_string(y));
    }
  }
}

// Accumulates analytic gradients into `grads` (same shapes as the model).
void backward(const RgcnModel& model, const GraphTensors& tensors,
              const ForwardCache& cache, const std::vector<int>& labels,
              RgcnModel& grads) {
  std::size_t n = tensors.n_nodes;
  std::size_t R = model.n_relations();
  std::size_t L = model.layers.size();

  Eigen::MatrixXd dLogits = cache.probs;
  for (std::size_t i = 0; i < n; ++i) {
    dLogits(static_cast<Eigen::Index>(i), labels[i]) -= 1.0;
  }
  dLogits /= static_cast<double>(n);

  grads.head.noalias() += dLogits.transpose() * cache.H.back();
  Eigen::MatrixXd dH = dLogits * model.head;

  for (std::size_t li = L; li-- > 0;) {
    const RgcnLayer& layer = model.layers[li];
    RgcnLayer& glayer = grads.layers[li];
    Eigen::MatrixXd dS =
        ((cache.S[li].array() > 0.0).cast<double>() * dH.array()).matrix();
    const Eigen::MatrixXd& H = cache.H[li];

    glayer.self_weight.noalias() += dS.transpose() * H;
    Eigen::MatrixXd dHprev = dS * layer.self_weight;
    for (std::size_t r = 0; r < R; ++r) {
      Eigen::MatrixXd dWr = dS.transpose() * cache.G[li][r];
      for (std::size_t b = 0; b < layer.bases.size(); ++b) {
        glayer.coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b)) +=
            (dWr.array() * layer.bases[b].array()).sum();
        glayer.bases[b].noalias() +=
            layer.coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b)) * dWr;
      }
      dHprev.noalias() +=
          tensors.adjacency[r].transpose() * (dS * layer.relation_weight(r));
    }
    dH = std::move(dHprev);
  }

  // dX scatters into the embedding tables.
  const FeatureEncoder& enc = model.encoder;
  Eigen::MatrixXd* tables[5] = {&grads.encoder.ner, &grads.encoder.pos,
                                &grads.encoder.stop, &grads.encoder.len,
                                &grads.encoder.seq};
  const Eigen::MatrixXd* shapes[5] = {&enc.ner, &enc.pos, &enc.stop, &enc.len,
                                      &enc.seq};
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index off = 0;
    for (std::size_t t = 0; t < 5; ++t) {
      Eigen::Index w = shapes[t]->cols();
      tables[t]->row(static_cast<Eigen::Index>(tensors.feature_rows[i][t])) +=
          dH.row(static_cast<Eigen::Index>(i)).segment(off, w);
      off += w;
    }
  }
}

void sgd_step(RgcnModel& model, const RgcnModel& grads, double lr) {
  std::vector<Eigen::MatrixXd*> p = model.parameter_blocks();
  std::vector<const Eigen::MatrixXd*> g = grads.parameter_blocks();
  for (std::size_t k = 0; k < p.size(); ++k) *p[k] -= lr * (*g[k]);
}

void zero_blocks(RgcnModel& m) {
  for (Eigen::MatrixXd* b : m.parameter_blocks()) b->setZero();
}

// Sign pattern of every pre-activation, used to detect ReLU kink crossings
// in the finite-difference check.
std::vector<char> activation_signs(const ForwardCache& cache) {
  std::vector<char> signs;
  for (const Eigen::MatrixXd& S : cache.S) {
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      for (Eigen::Index j = 0; j < S.cols(); ++j) {
        signs.push_back(S(i, j) > 0.0 ? 1 : 0);
      }
    }
  }
  return signs;
}

}  // namespace

std::size_t pos_feature_index(Pos p) { return static_cast<std::size_t>(p); }
std::size_t ner_feature_index(Ner n) { return static_cast<std::size_t>(n); }

std::size_t char_len_bucket(std::size_t char_len) {
  if (char_len == 0) return 5;  // fallback row; char_len is normally positive
  if (char_len >= 5) return 4;
  return char_len - 1;
}

std::size_t seq_id_bucket(std::size_t seq_id) {
  if (seq_id <= 5) return seq_id;
  if (seq_id <= 7) return 6;
  if (seq_id <= 15) return 7;
  if (seq_id <= 31) return 8;
  if (seq_id <= 63) return 9;
  return 10;
}

FeatureEncoder FeatureEncoder::init(Rng& rng, std::size_t ner_w, std::size_t pos_w,
                                    std::size_t stop_w, std::size_t len_w,
                                    std::size_t seq_w) {
  FeatureEncoder enc;
  enc.ner = gaussian_matrix(rng, 7, ner_w, 0.1);
  enc.pos = gaussian_matrix(rng, 7, pos_w, 0.1);
  enc.stop = gaussian_matrix(rng, 3, stop_w, 0.1);
  enc.len = gaussian_matrix(rng, 6, len_w, 0.1);
  enc.seq = gaussian_matrix(rng, 12, seq_w, 0.1);
  return enc;
}

std::size_t FeatureEncoder::width() const {
  return static_cast<std::size_t>(ner.cols() + pos.cols() + stop.cols() +
                                  len.cols() + seq.cols());
}

std::array<std::size_t, 5> FeatureEncoder::feature_rows(
    const InteractionNode& node) const {
  auto clamp = [](std::size_t idx, const Eigen::MatrixXd& table) {
    std::size_t rows = static_cast<std::size_t>(table.rows());
    return idx < rows ? idx : rows - 1;
  };
  return {clamp(ner_feature_index(node.features.ner), ner),
          clamp(pos_feature_index(node.features.pos), pos),
          clamp(node.features.is_stop ? 1 : 0, stop),
          clamp(char_len_bucket(node.features.char_len), len),
          clamp(seq_id_bucket(node.seq_id), seq)};
}

Eigen::MatrixXd RgcnLayer::relation_weight(std::size_t r) const {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(self_weight.rows(), self_weight.cols());
  for (std::size_t b = 0; b < bases.size(); ++b) {
    W.noalias() +=
        coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b)) * bases[b];
  }
  return W;
}

void TrainConfig::validate() const {
  if (learning_rate < 0.0) throw DataError("learning rate must be nonnegative");
  if (epochs == 0) throw DataError("epochs must be at least 1");
}

RgcnModel RgcnModel::create(const RgcnConfig& config,
                            const std::vector<std::string>& relation_labels,
                            std::uint64_t seed) {
  if (config.layers == 0 || config.hidden == 0 || config.bases == 0) {
    throw DataError("degenerate network configuration");
  }
  if (config.classes < 2) throw DataError("head needs at least two classes");

  RgcnModel model;
  Rng rng(seed);
  model.encoder = FeatureEncoder::init(rng);
  model.n_classes = config.classes;

  model.relation_vocab["<unk>"] = 0;
  std::vector<std::string> labels = relation_labels;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  for (const auto& l : labels) {
    if (model.relation_vocab.count(l) == 0) {
      std::size_t idx = model.relation_vocab.size();
      model.relation_vocab[l] = idx;
    }
  }
  std::size_t R = model.relation_vocab.size();

  std::size_t d_in = model.encoder.width();
  for (std::size_t l = 0; l < config.layers; ++l) {
    RgcnLayer layer;
    double scale = std::sqrt(2.0 / static_cast<double>(d_in + config.hidden));
    for (std::size_t b = 0; b < config.bases; ++b) {
      layer.bases.push_back(gaussian_matrix(rng, config.hidden, d_in, scale));
    }
    layer.coeff = gaussian_matrix(rng, R, config.bases,
                                  1.0 / std::sqrt(static_cast<double>(config.bases)));
    layer.self_weight = gaussian_matrix(rng, config.hidden, d_in, scale);
    model.layers.push_back(std::move(layer));
    d_in = config.hidden;
  }
  double head_scale = std::sqrt(2.0 / static_cast<double>(d_in + config.classes));
  model.head = gaussian_matrix(rng, config.classes, d_in, head_scale);
  return model;
}

std::size_t RgcnModel::relation_index(const std::string& label) const {
  auto it = relation_vocab.find(label);
  return it == relation_vocab.end() ? 0 : it->second;
}

RgcnModel RgcnModel::zeros_like() const {
  RgcnModel z = *this;
  zero_blocks(z);
  return z;
}

std::vector<Eigen::MatrixXd*> RgcnModel::parameter_blocks() {
  std::vector<Eigen::MatrixXd*> blocks{&encoder.ner, &encoder.pos, &encoder.stop,
                                       &encoder.len, &encoder.seq};
  for (RgcnLayer& layer : layers) {
    for (Eigen::MatrixXd& b : layer.bases) blocks.push_back(&b);
    blocks.push_back(&layer.coeff);
    blocks.push_back(&layer.self_weight);
  }
  blocks.push_back(&head);
  return blocks;
}

std::vector<const Eigen::MatrixXd*> RgcnModel::parameter_blocks() const {
  std::vector<const Eigen::MatrixXd*> blocks{&encoder.ner, &encoder.pos,
                                             &encoder.stop, &encoder.len,
                                             &encoder.seq};
  for (const RgcnLayer& layer : layers) {
    for (const Eigen::MatrixXd& b : layer.bases) blocks.push_back(&b);
    blocks.push_back(&layer.coeff);
    blocks.push_back(&layer.self_weight);
  }
  blocks.push_back(&head);
  return blocks;
}

std::size_t RgcnModel::parameter_count() const {
  std::size_t total = 0;
  for (const Eigen::MatrixXd* b : parameter_blocks()) {
    total += static_cast<std::size_t>(b->size());
  }
  return total;
}

GraphTensors prepare_graph(const RgcnModel& model, const InteractionGraph& graph) {
  GraphTensors t;
  t.n_nodes = graph.nodes.size();
  std::size_t R = model.n_relations();
  std::size_t n = t.n_nodes;

  std::vector<std::vector<double>> indegree(R, std::vector<double>(n, 0.0));
  for (const auto& e : graph.edges) {
    indegree[model.relation_index(e.relation)][e.dst] += 1.0;
  }
  t.adjacency.assign(R, Eigen::MatrixXd::Zero(n, n));
  for (const auto& e : graph.edges) {
    std::size_t r = model.relation_index(e.relation);
    t.adjacency[r](static_cast<Eigen::Index>(e.dst), static_cast<Eigen::Index>(e.src)) +=
        1.0 / indegree[r][e.dst];
  }

  t.feature_rows.reserve(n);
  for (const auto& node : graph.nodes) {
    t.feature_rows.push_back(model.encoder.feature_rows(node));
  }
  return t;
}

Eigen::MatrixXd encode_features(const InteractionGraph& graph,
                                const FeatureEncoder& encoder) {
  Eigen::MatrixXd X(graph.nodes.size(), encoder.width());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    auto rows = encoder.feature_rows(graph.nodes[i]);
    Eigen::Index off = 0;
    const Eigen::MatrixXd* tables[5] = {&encoder.ner, &encoder.pos, &encoder.stop,
                                        &encoder.len, &encoder.seq};
    for (std::size_t t = 0; t < 5; ++t) {
      Eigen::Index w = tables[t]->cols();
      X.row(static_cast<Eigen::Index>(i)).segment(off, w) =
          tables[t]->row(static_cast<Eigen::Index>(rows[t]));
      off += w;
    }
  }
  return X;
}

Eigen::MatrixXd rgcn_forward(const RgcnModel& model, const InteractionGraph& graph) {
  GraphTensors tensors = prepare_graph(model, graph);
  ForwardCache cache;
  forward_cached(model, tensors, cache);
  return cache.probs;
}

EvalResult rgcn_eval(const RgcnModel& model, const GraphTensors& tensors,
                     const std::vector<int>& labels) {
  check_labels(model, tensors.n_nodes, labels);
  ForwardCache cache;
  forward_cached(model, tensors, cache);
  return EvalResult{mean_cross_entropy(cache.probs, labels), cache.probs};
}

std::vector<double> rgcn_train(RgcnModel& model, const std::vector<TrainExample>& dataset,
                               const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw DataError("training requires at least one example");

  std::vector<GraphTensors> tensors;
  tensors.reserve(dataset.size());
  for (const auto& ex : dataset) {
    check_labels(model, ex.graph.nodes.size(), ex.labels);
    tensors.push_back(prepare_graph(model, ex.graph));
  }

  RgcnModel grads = model.zeros_like();
  std::vector<double> trace;
  trace.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double total = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      ForwardCache cache;
      forward_cached(model, tensors[i], cache);
      total += mean_cross_entropy(cache.probs, dataset[i].labels);
      zero_blocks(grads);
      backward(model, tensors[i], cache, dataset[i].labels, grads);
      sgd_step(model, grads, config.learning_rate);
    }
    trace.push_back(total / static_cast<double>(dataset.size()));
  }
  return trace;
}

double gradient_check(const RgcnModel& model, const InteractionGraph& graph,
                      const std::vector<int>& labels, std::size_t sample_size,
                      std::uint64_t seed, double step) {
  check_labels(model, graph.nodes.size(), labels);
  GraphTensors tensors = prepare_graph(model, graph);

  RgcnModel work = model;
  RgcnModel grads = model.zeros_like();
  ForwardCache cache;
  forward_cached(work, tensors, cache);
  backward(work, tensors, cache, labels, grads);

  std::vector<Eigen::MatrixXd*> pblocks = work.parameter_blocks();
  std::vector<Eigen::MatrixXd*> gblocks = grads.parameter_blocks();
  std::size_t total = work.parameter_count();
  if (total == 0) return 0.0;

  Rng rng(seed);
  double max_err = 0.0;
  for (std::size_t s = 0; s < sample_size; ++s) {
    std::size_t flat = static_cast<std::size_t>(rng.below(total));
    std::size_t bi = 0;
    while (flat >= static_cast<std::size_t>(pblocks[bi]->size())) {
      flat -= static_cast<std::size_t>(pblocks[bi]->size());
      ++bi;
    }
    double* param = pblocks[bi]->data() + flat;
    double analytic = *(gblocks[bi]->data() + flat);

    double original = *param;
    *param = original + step;
    ForwardCache plus;
    forward_cached(work, tensors, plus);
    double loss_plus = mean_cross_entropy(plus.probs, labels);
    std::vector<char> signs_plus = activation_signs(plus);

    *param = original - step;
    ForwardCache minus;
    forward_cached(work, tensors, minus);
    double loss_minus = mean_cross_entropy(minus.probs, labels);
    std::vector<char> signs_minus = activation_signs(minus);
    *param = original;

    // A sign flip between the two evaluations means the finite difference
    // straddles a ReLU kink; the comparison is not meaningful there.
    if (signs_plus != signs_minus) continue;

    double numeric = (loss_plus - loss_minus) / (2.0 * step);
    double denom = std::max(1e-8, std::abs(analytic) + std::abs(numeric));
    max_err = std::max(max_err, std::abs(analytic - numeric) / denom);
  }
  return max_err;
}

void save_rgcn(const RgcnModel& model, const std::string& path) {
  Json root;
  root["format"] = "rgcn-checkpoint";
  root["version"] = 1;
  root["classes"] = model.n_classes;
  Json rel = Json::object();
  for (const auto& [label, idx] : model.relation_vocab) rel[label] = idx;
  root["relations"] = rel;
  Json enc;
  enc["ner"] = matrix_to_json(model.encoder.ner);
  enc["pos"] = matrix_to_json(model.encoder.pos);
  enc["stop"] = matrix_to_json(model.encoder.stop);
  enc["len"] = matrix_to_json(model.encoder.len);
  enc["seq"] = matrix_to_json(model.encoder.seq);
  root["encoder"] = enc;
  root["layers"] = Json::array();
  for (const RgcnLayer& layer : model.layers) {
    Json jl;
    jl["bases"] = Json::array();
    for (const auto& b : layer.bases) jl["bases"].push_back(matrix_to_json(b));
    jl["coeff"] = matrix_to_json(layer.coeff);
    jl["self"] = matrix_to_json(layer.self_weight);
    root["layers"].push_back(std::move(jl));
  }
  root["head"] = matrix_to_json(model.head);
  write_json_file(path, root);
}

RgcnModel load_rgcn(const std::string& path) {
  Json root = read_json_file(path);
  if (!root.is_object() || root.value("format", "") != "rgcn-checkpoint") {
    throw DataError("not an rgcn checkpoint: " + path);
  }
  if (root.value("version", 0) != 1) {
    throw DataError("unsupported checkpoint version in " + path);
  }
  RgcnModel model;
  model.n_classes = root.at("classes").get<std::size_t>();
  for (const auto& [label, idx] : root.at("relations").items()) {
    model.relation_vocab[label] = idx.get<std::size_t>();
  }
  if (model.relation_vocab.count("<unk>") == 0 || model.relation_vocab.at("<unk>") != 0) {
    throw DataError("checkpoint missing reserved unknown relation");
  }
  const Json& enc = root.at("encoder");
  model.encoder.ner = matrix_from_json(enc.at("ner"), "encoder.ner");
  model.encoder.pos = matrix_from_json(enc.at("pos"), "encoder.pos");
  model.encoder.stop = matrix_from_json(enc.at("stop"), "encoder.stop");
  model.encoder.len = matrix_from_json(enc.at("len"), "encoder.len");
  model.encoder.seq = matrix_from_json(enc.at("seq"), "encoder.seq");
  for (const Json& jl : root.at("layers")) {
    RgcnLayer layer;
    for (const Json& jb : jl.at("bases")) {
      layer.bases.push_back(matrix_from_json(jb, "layer bases"));
    }
    layer.coeff = matrix_from_json(jl.at("coeff"), "layer coeff");
    layer.self_weight = matrix_from_json(jl.at("self"), "layer self");
    if (layer.bases.empty()) throw DataError("checkpoint layer without bases");
    model.layers.push_back(std::move(layer));
  }
  model.head = matrix_from_json(root.at("head"), "head");

  // Dimension chain sanity before the model is used.
  std::size_t d = model.encoder.width();
  for (const RgcnLayer& layer : model.layers) {
    if (layer.d_in() != d) throw DataError("checkpoint layer dimension mismatch");
    d = layer.d_out();
  }
  if (static_cast<std::size_t>(model.head.cols()) != d) {
    throw DataError("checkpoint head dimension mismatch");
  }
  return model;
}

std::vector<int> predict_classes(const Eigen::MatrixXd& probs) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < probs.cols(); ++j) {
      if (probs(i, j) > probs(i, best)) best = static_cast<int>(j);
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace ao
