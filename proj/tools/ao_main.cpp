// Command-line entry point wiring every stage: synthetic corpora, click-log
// ingestion, clustering, model training, phrase mining, relationship linking,
// ontology assembly, tagging, story trees, query rewriting, evaluation, and
// the ontology audit. One JSON config file carries per-stage sections; flags
// override file values; every artifact gets a .run.json sidecar with the
// resolved configuration and no timestamps, so reruns are byte-identical.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ao/annotate.hpp"
#include "ao/apps.hpp"
#include "ao/click_graph.hpp"
#include "ao/common.hpp"
#include "ao/embedder.hpp"
#include "ao/jsonl.hpp"
#include "ao/linker.hpp"
#include "ao/metrics.hpp"
#include "ao/miner.hpp"
#include "ao/ontology.hpp"
#include "ao/random_walk.hpp"
#include "ao/rgcn.hpp"
#include "ao/synthetic.hpp"
#include "ao/tfidf.hpp"

namespace {

using ao::Json;

// ---------------------------------------------------------------------------
// Config plumbing. The file is {"version": str?, "<stage>": {key: value}};
// unknown sections and keys are rejected before any stage runs.

const std::map<std::string, std::set<std::string>>& known_config_keys() {
  static const std::map<std::string, std::set<std::string>> kKnown = {
      {"synth",
       {"seed", "clusters", "queries_per_cluster", "docs_per_cluster", "noise",
        "kind", "phrase_min", "phrase_max", "out_dir"}},
      {"ingest", {"log", "out"}},
      {"cluster",
       {"graph", "out", "stoplist", "seeds", "restart", "max_iterations",
        "epsilon", "visit_threshold", "overlap"}},
      {"train",
       {"dataset", "out", "lexicon", "stoplist", "elements", "hidden", "layers",
        "bases", "classes", "epochs", "learning_rate", "seed"}},
      {"mine",
       {"graph", "clusters", "model", "out", "kind", "lexicon", "stoplist",
        "synonyms", "delta_m", "atsp_exact_threshold", "atsp_seed",
        "atsp_restarts"}},
      {"build-ontology",
       {"phrases", "graph", "out", "delta_g", "lexicon", "stoplist",
        "derive_suffixes", "min_frequency", "derive_topics",
        "min_search_count"}},
      {"link",
       {"ontology", "out", "graph", "sessions", "lexicon", "stoplist", "seed",
        "classifier_learning_rate", "classifier_epochs", "elements_model",
        "elements_dataset", "embed_dim", "embed_margin", "embed_seed",
        "embed_epochs", "embed_learning_rate", "negatives_per_positive",
        "correlate_threshold"}},
      {"tag",
       {"ontology", "docs", "out", "mode", "stoplist", "score_threshold",
        "lcs_fraction", "bow_threshold"}},
      {"story-tree",
       {"ontology", "seed_event", "out", "cut", "dim", "weight_semantic",
        "weight_trigger", "weight_entities"}},
      {"rewrite", {"ontology", "query", "out"}},
      {"eval",
       {"mode", "phrases", "truth", "model", "dataset", "lexicon", "stoplist",
        "out"}},
      {"audit", {"ontology"}},
  };
  return kKnown;
}

void validate_config(const Json& config, const std::string& path) {
  if (!config.is_object()) {
    throw ao::UsageError(path + ": config root must be a JSON object");
  }
  const auto& known = known_config_keys();
  for (const auto& [section, body] : config.items()) {
    if (section == "version") continue;
    auto it = known.find(section);
    if (it == known.end()) {
      throw ao::UsageError(path + ": unknown config section '" + section + "'");
    }
    if (!body.is_object()) {
      throw ao::UsageError(path + ": section '" + section + "' must be an object");
    }
    for (const auto& [key, value] : body.items()) {
      (void)value;
      if (it->second.count(key) == 0) {
        throw ao::UsageError(path + ": unknown key '" + key + "' in section '" +
                             section + "'");
      }
    }
  }
}

// Resolves one stage's settings with precedence flag > config > default and
// records every resolved value for the sidecar.
class Settings {
public:
  Settings(const Json& config, std::string stage) : stage_(std::move(stage)) {
    if (config.contains(stage_)) section_ = &config.at(stage_);
  }

  std::string str(const CLI::Option* opt, const std::string& flag_value,
                  const char* key, const std::string& fallback) {
    std::string v = fallback;
    if (const Json* j = config_value(key)) {
      if (!j->is_string()) throw type_error(key, "string");
      v = j->get<std::string>();
    }
    if (opt != nullptr && opt->count() > 0) v = flag_value;
    resolved_[key] = v;
    return v;
  }

  std::string required(const CLI::Option* opt, const std::string& flag_value,
                       const char* key) {
    std::string v = str(opt, flag_value, key, "");
    if (v.empty()) {
      throw ao::UsageError("missing required setting '" + std::string(key) +
                           "' for " + stage_);
    }
    return v;
  }

  std::vector<std::string> str_list(const CLI::Option* opt,
                                    const std::vector<std::string>& flag_value,
                                    const char* key) {
    std::vector<std::string> v;
    if (const Json* j = config_value(key)) {
      if (!j->is_array()) throw type_error(key, "string array");
      for (const auto& item : *j) {
        if (!item.is_string()) throw type_error(key, "string array");
        v.push_back(item.get<std::string>());
      }
    }
    if (opt != nullptr && opt->count() > 0) v = flag_value;
    resolved_[key] = v;
    return v;
  }

  double num(const CLI::Option* opt, double flag_value, const char* key,
             double fallback) {
    double v = fallback;
    if (const Json* j = config_value(key)) {
      if (!j->is_number()) throw type_error(key, "number");
      v = j->get<double>();
    }
    if (opt != nullptr && opt->count() > 0) v = flag_value;
    resolved_[key] = v;
    return v;
  }

  long long integer(const CLI::Option* opt, long long flag_value,
                    const char* key, long long fallback) {
    long long v = fallback;
    if (const Json* j = config_value(key)) {
      if (!j->is_number_integer()) throw type_error(key, "integer");
      v = j->get<long long>();
    }
    if (opt != nullptr && opt->count() > 0) v = flag_value;
    resolved_[key] = v;
    return v;
  }

  std::size_t size(const CLI::Option* opt, long long flag_value,
                   const char* key, long long fallback) {
    long long v = integer(opt, flag_value, key, fallback);
    if (v < 0) {
      throw ao::UsageError("setting '" + std::string(key) +
                           "' must be nonnegative");
    }
    return static_cast<std::size_t>(v);
  }

  bool boolean(const CLI::Option* opt, bool flag_value, const char* key,
               bool fallback) {
    bool v = fallback;
    if (const Json* j = config_value(key)) {
      if (!j->is_boolean()) throw type_error(key, "boolean");
      v = j->get<bool>();
    }
    if (opt != nullptr && opt->count() > 0) v = flag_value;
    resolved_[key] = v;
    return v;
  }

  const Json& resolved() const { return resolved_; }
  const std::string& stage() const { return stage_; }

private:
  const Json* config_value(const char* key) const {
    if (section_ != nullptr && section_->contains(key)) return &section_->at(key);
    return nullptr;
  }
  ao::UsageError type_error(const char* key, const char* expected) const {
    return ao::UsageError("config " + stage_ + "." + key + " must be a " +
                          expected);
  }

  std::string stage_;
  const Json* section_ = nullptr;
  Json resolved_ = Json::object();
};

void finish_stage(const Settings& settings, const std::string& sidecar_path) {
  Json doc;
  doc["command"] = settings.stage();
  doc["config"] = settings.resolved();
  std::cerr << "config " << doc.dump() << "\n";
  if (!sidecar_path.empty()) ao::write_json_file(sidecar_path, doc);
}

ao::LexiconAnnotator make_annotator(const std::string& lexicon_path,
                                    const std::string& stoplist_path) {
  ao::Lexicon lexicon;
  if (!lexicon_path.empty()) lexicon = ao::load_lexicon(lexicon_path);
  ao::Stoplist stoplist;
  if (!stoplist_path.empty()) stoplist = ao::load_stoplist(stoplist_path);
  return ao::LexiconAnnotator(std::move(lexicon), std::move(stoplist));
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::string current;
  for (char c : value) {
    if (c == ',') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

// ---------------------------------------------------------------------------
// Cluster serialization shared by the cluster and mine stages.

void save_clusters(const std::string& path,
                   const std::vector<ao::QueryDocCluster>& clusters) {
  std::vector<Json> recs;
  recs.reserve(clusters.size());
  for (const auto& c : clusters) {
    Json rec;
    rec["seed_query_id"] = c.seed_query_id;
    Json qs = Json::array();
    for (const auto& [id, p] : c.queries) qs.push_back(Json::array({id, p}));
    Json ds = Json::array();
    for (const auto& [id, p] : c.docs) ds.push_back(Json::array({id, p}));
    rec["queries"] = qs;
    rec["docs"] = ds;
    recs.push_back(std::move(rec));
  }
  ao::write_jsonl(path, recs);
}

std::vector<ao::QueryDocCluster> load_clusters(const std::string& path) {
  std::vector<ao::QueryDocCluster> out;
  ao::read_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    std::string ctx = path + ":" + std::to_string(line_no);
    ao::QueryDocCluster c;
    c.seed_query_id = ao::require_string(rec, "seed_query_id", ctx);
    auto pairs = [&](const char* key) {
      std::vector<std::pair<std::string, double>> values;
      if (!rec.contains(key) || !rec[key].is_array()) {
        throw ao::DataError(ctx + ": expected array '" + key + "'");
      }
      for (const auto& item : rec[key]) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
            !item[1].is_number()) {
          throw ao::DataError(ctx + ": malformed (id, probability) pair in '" +
                              key + "'");
        }
        values.emplace_back(item[0].get<std::string>(), item[1].get<double>());
      }
      return values;
    };
    c.queries = pairs("queries");
    c.docs = pairs("docs");
    out.push_back(std::move(c));
  });
  return out;
}

std::vector<ao::DocRecord> load_doc_file(const std::string& path) {
  std::vector<ao::DocRecord> out;
  ao::read_jsonl(path, [&](std::size_t line_no, const Json& rec) {
    std::string ctx = path + ":" + std::to_string(line_no);
    ao::DocRecord d;
    d.id = ao::require_string(rec, "doc_id", ctx);
    d.title = ao::require_string(rec, "title", ctx);
    if (rec.contains("content_head")) {
      d.content_head = ao::require_string(rec, "content_head", ctx);
    }
    out.push_back(std::move(d));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Stage runners. Each resolves its settings, does the work, then echoes the
// resolved config and writes the sidecar next to its primary artifact.

struct SynthOpts {
  long long seed = 1;
  long long clusters = 10;
  long long queries_per_cluster = 4;
  long long docs_per_cluster = 3;
  double noise = 0.0;
  std::string kind = "concept";
  long long phrase_min = 2;
  long long phrase_max = 4;
  std::string out_dir;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_clusters = nullptr;
  CLI::Option* o_queries = nullptr;
  CLI::Option* o_docs = nullptr;
  CLI::Option* o_noise = nullptr;
  CLI::Option* o_kind = nullptr;
  CLI::Option* o_min = nullptr;
  CLI::Option* o_max = nullptr;
  CLI::Option* o_out = nullptr;
};

int run_synth(const Json& config, const SynthOpts& opts) {
  Settings s(config, "synth");
  ao::SynthSpec spec;
  std::uint64_t seed =
      static_cast<std::uint64_t>(s.integer(opts.o_seed, opts.seed, "seed", 1));
  spec.n_clusters = s.size(opts.o_clusters, opts.clusters, "clusters", 10);
  spec.queries_per_cluster =
      s.size(opts.o_queries, opts.queries_per_cluster, "queries_per_cluster", 4);
  spec.docs_per_cluster =
      s.size(opts.o_docs, opts.docs_per_cluster, "docs_per_cluster", 3);
  spec.noise = s.num(opts.o_noise, opts.noise, "noise", 0.0);
  std::string kind = s.str(opts.o_kind, opts.kind, "kind", "concept");
  if (kind == "concept") {
    spec.kind = ao::SynthKind::concepts;
  } else if (kind == "event") {
    spec.kind = ao::SynthKind::events;
  } else {
    throw ao::UsageError("synth kind must be concept or event, got '" + kind + "'");
  }
  spec.phrase_len_min = s.size(opts.o_min, opts.phrase_min, "phrase_min", 2);
  spec.phrase_len_max = s.size(opts.o_max, opts.phrase_max, "phrase_max", 4);
  std::string out_dir = s.required(opts.o_out, opts.out_dir, "out_dir");

  ao::SynthResult result = ao::generate_synthetic(spec, seed);
  std::filesystem::create_directories(out_dir);
  ao::save_click_graph(result.graph, out_dir + "/clicks.jsonl");
  ao::write_dataset(out_dir + "/dataset.jsonl", result);
  ao::write_truth(out_dir + "/truth.json", result);
  ao::write_lexicon_file(out_dir + "/lexicon.tsv", result.lexicon_entries);
  ao::write_stoplist_file(out_dir + "/stopwords.txt", result.stopwords);
  std::cerr << "synth: " << result.clusters.size() << " clusters, "
            << result.graph.query_count() << " queries, "
            << result.graph.doc_count() << " docs\n";
  finish_stage(s, out_dir + "/synth.run.json");
  return 0;
}

struct PathPair {
  std::string in;
  std::string out;
  CLI::Option* o_in = nullptr;
  CLI::Option* o_out = nullptr;
};

int run_ingest(const Json& config, const PathPair& opts) {
  Settings s(config, "ingest");
  std::string log = s.required(opts.o_in, opts.in, "log");
  std::string out = s.required(opts.o_out, opts.out, "out");
  ao::ClickGraph graph = ao::load_click_log(log);
  ao::save_click_graph(graph, out);
  std::cerr << "ingest: " << graph.query_count() << " queries, "
            << graph.doc_count() << " docs, " << graph.edges().size()
            << " edges\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct ClusterOpts {
  std::string graph;
  std::string out;
  std::string stoplist;
  std::string seeds;
  double restart = 0.15;
  long long max_iterations = 50;
  double epsilon = 1e-8;
  double visit_threshold = 0.001;
  double overlap = 0.5;
  CLI::Option* o_graph = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_stoplist = nullptr;
  CLI::Option* o_seeds = nullptr;
  CLI::Option* o_restart = nullptr;
  CLI::Option* o_max_iterations = nullptr;
  CLI::Option* o_epsilon = nullptr;
  CLI::Option* o_visit = nullptr;
  CLI::Option* o_overlap = nullptr;
};

int run_cluster(const Json& config, const ClusterOpts& opts) {
  Settings s(config, "cluster");
  std::string graph_path = s.required(opts.o_graph, opts.graph, "graph");
  std::string out = s.required(opts.o_out, opts.out, "out");
  std::string stoplist_path = s.str(opts.o_stoplist, opts.stoplist, "stoplist", "");
  std::string seeds_csv = s.str(opts.o_seeds, opts.seeds, "seeds", "");
  ao::WalkParams params;
  params.restart_probability = s.num(opts.o_restart, opts.restart, "restart", 0.15);
  params.max_iterations =
      s.size(opts.o_max_iterations, opts.max_iterations, "max_iterations", 50);
  params.convergence_epsilon = s.num(opts.o_epsilon, opts.epsilon, "epsilon", 1e-8);
  params.visit_threshold =
      s.num(opts.o_visit, opts.visit_threshold, "visit_threshold", 0.001);
  params.overlap_fraction = s.num(opts.o_overlap, opts.overlap, "overlap", 0.5);
  params.validate();

  ao::ClickGraph graph = ao::load_click_log(graph_path);
  ao::TransitionModel model = ao::transport_probabilities(graph);
  ao::Stoplist stoplist;
  if (!stoplist_path.empty()) stoplist = ao::load_stoplist(stoplist_path);

  std::vector<std::string> seeds = split_csv(seeds_csv);
  if (seeds.empty()) {
    for (const auto& q : graph.queries()) seeds.push_back(q.id);
  }
  std::vector<ao::QueryDocCluster> clusters;
  clusters.reserve(seeds.size());
  for (const auto& seed : seeds) {
    clusters.push_back(ao::random_walk_cluster(
        graph, model, seed, params, stoplist_path.empty() ? nullptr : &stoplist));
  }
  save_clusters(out, clusters);
  std::cerr << "cluster: " << clusters.size() << " clusters\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct TrainOpts {
  std::string dataset;
  std::string out;
  std::string lexicon;
  std::string stoplist;
  bool elements = false;
  long long hidden = 32;
  long long layers = 5;
  long long bases = 5;
  long long classes = 0;
  long long epochs = 50;
  double learning_rate = 0.05;
  long long seed = 1;
  CLI::Option* o_dataset = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_lexicon = nullptr;
  CLI::Option* o_stoplist = nullptr;
  CLI::Option* o_elements = nullptr;
  CLI::Option* o_hidden = nullptr;
  CLI::Option* o_layers = nullptr;
  CLI::Option* o_bases = nullptr;
  CLI::Option* o_classes = nullptr;
  CLI::Option* o_epochs = nullptr;
  CLI::Option* o_lr = nullptr;
  CLI::Option* o_seed = nullptr;
};

int run_train(const Json& config, const TrainOpts& opts) {
  Settings s(config, "train");
  std::string dataset_path = s.required(opts.o_dataset, opts.dataset, "dataset");
  std::string out = s.required(opts.o_out, opts.out, "out");
  std::string lexicon = s.str(opts.o_lexicon, opts.lexicon, "lexicon", "");
  std::string stoplist = s.str(opts.o_stoplist, opts.stoplist, "stoplist", "");
  bool elements = s.boolean(opts.o_elements, opts.elements, "elements", false);
  ao::RgcnConfig model_config;
  model_config.hidden = s.size(opts.o_hidden, opts.hidden, "hidden", 32);
  model_config.layers = s.size(opts.o_layers, opts.layers, "layers", 5);
  model_config.bases = s.size(opts.o_bases, opts.bases, "bases", 5);
  long long classes = s.integer(opts.o_classes, opts.classes, "classes", 0);
  model_config.classes = classes > 0 ? static_cast<std::size_t>(classes)
                                     : (elements ? 4 : 2);
  ao::TrainConfig train_config;
  train_config.epochs = s.size(opts.o_epochs, opts.epochs, "epochs", 50);
  train_config.learning_rate =
      s.num(opts.o_lr, opts.learning_rate, "learning_rate", 0.05);
  train_config.seed =
      static_cast<std::uint64_t>(s.integer(opts.o_seed, opts.seed, "seed", 1));
  train_config.validate();

  ao::LexiconAnnotator annotator = make_annotator(lexicon, stoplist);
  std::vector<ao::DatasetExample> examples = ao::load_dataset(dataset_path);
  std::vector<ao::TrainExample> train_set;
  train_set.reserve(examples.size());
  std::set<std::string> relation_labels;
  for (const auto& ex : examples) {
    train_set.push_back(ao::make_train_example(ex, annotator, elements));
    for (const auto& edge : train_set.back().graph.edges) {
      relation_labels.insert(edge.relation);
    }
  }
  ao::RgcnModel model = ao::RgcnModel::create(
      model_config,
      std::vector<std::string>(relation_labels.begin(), relation_labels.end()),
      train_config.seed);
  std::vector<double> trace = ao::rgcn_train(model, train_set, train_config);
  ao::save_rgcn(model, out);
  std::cerr << "train: " << train_set.size() << " examples, "
            << model.n_relations() << " relations";
  if (!trace.empty()) {
    std::cerr << ", loss " << trace.front() << " -> " << trace.back();
  }
  std::cerr << "\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct MineOpts {
  std::string graph;
  std::string clusters;
  std::string model;
  std::string out;
  std::string kind = "concept";
  std::string lexicon;
  std::string stoplist;
  std::string synonyms;
  double delta_m = 0.3;
  long long atsp_exact_threshold = 10;
  long long atsp_seed = 1;
  long long atsp_restarts = 32;
  CLI::Option* o_graph = nullptr;
  CLI::Option* o_clusters = nullptr;
  CLI::Option* o_model = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_kind = nullptr;
  CLI::Option* o_lexicon = nullptr;
  CLI::Option* o_stoplist = nullptr;
  CLI::Option* o_synonyms = nullptr;
  CLI::Option* o_delta_m = nullptr;
  CLI::Option* o_atsp_exact = nullptr;
  CLI::Option* o_atsp_seed = nullptr;
  CLI::Option* o_atsp_restarts = nullptr;
};

int run_mine(const Json& config, const MineOpts& opts) {
  Settings s(config, "mine");
  std::string graph_path = s.required(opts.o_graph, opts.graph, "graph");
  std::string clusters_path = s.required(opts.o_clusters, opts.clusters, "clusters");
  std::string model_path = s.required(opts.o_model, opts.model, "model");
  std::string out = s.required(opts.o_out, opts.out, "out");
  ao::PhraseKind kind =
      ao::phrase_kind_from_name(s.str(opts.o_kind, opts.kind, "kind", "concept"));
  std::string lexicon = s.str(opts.o_lexicon, opts.lexicon, "lexicon", "");
  std::string stoplist = s.str(opts.o_stoplist, opts.stoplist, "stoplist", "");
  std::string synonyms_path = s.str(opts.o_synonyms, opts.synonyms, "synonyms", "");
  ao::MinerThresholds thresholds;
  thresholds.delta_m = s.num(opts.o_delta_m, opts.delta_m, "delta_m", 0.3);
  thresholds.validate();
  ao::AtspParams atsp;
  atsp.exact_threshold =
      s.size(opts.o_atsp_exact, opts.atsp_exact_threshold, "atsp_exact_threshold", 10);
  atsp.seed = static_cast<std::uint64_t>(
      s.integer(opts.o_atsp_seed, opts.atsp_seed, "atsp_seed", 1));
  atsp.restarts = s.size(opts.o_atsp_restarts, opts.atsp_restarts, "atsp_restarts", 32);

  ao::ClickGraph graph = ao::load_click_log(graph_path);
  std::vector<ao::QueryDocCluster> clusters = load_clusters(clusters_path);
  ao::RgcnModel model = ao::load_rgcn(model_path);
  ao::LexiconAnnotator annotator = make_annotator(lexicon, stoplist);
  ao::SynonymMap synonyms;
  if (!synonyms_path.empty()) synonyms = ao::load_synonyms(synonyms_path);

  ao::MineResult result = ao::mine_attention_nodes(
      clusters, graph, annotator, model, thresholds, kind,
      synonyms_path.empty() ? nullptr : &synonyms, atsp);
  ao::save_phrases(out, result.phrases);
  std::cerr << "mine: " << result.phrases.size() << " phrases from "
            << clusters.size() << " clusters, " << result.clusters_skipped
            << " skipped, " << result.decode_fallbacks << " decode fallbacks\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct BuildOntologyOpts {
  std::vector<std::string> phrases;
  std::string graph;
  std::string out;
  double delta_g = 0.3;
  std::string lexicon;
  std::string stoplist;
  bool derive_suffixes = true;
  long long min_frequency = 3;
  bool derive_topics = true;
  long long min_search_count = 1;
  CLI::Option* o_phrases = nullptr;
  CLI::Option* o_graph = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_delta_g = nullptr;
  CLI::Option* o_lexicon = nullptr;
  CLI::Option* o_stoplist = nullptr;
  CLI::Option* o_suffixes = nullptr;
  CLI::Option* o_min_frequency = nullptr;
  CLI::Option* o_topics = nullptr;
  CLI::Option* o_min_search = nullptr;
};

ao::NodeKind node_kind_for(ao::PhraseKind kind) {
  switch (kind) {
    case ao::PhraseKind::Concept: return ao::NodeKind::Concept;
    case ao::PhraseKind::Event: return ao::NodeKind::Event;
    case ao::PhraseKind::Topic: return ao::NodeKind::Topic;
  }
  throw ao::InvariantError("unhandled phrase kind");
}

int run_build_ontology(const Json& config, const BuildOntologyOpts& opts) {
  Settings s(config, "build-ontology");
  std::vector<std::string> phrase_files =
      s.str_list(opts.o_phrases, opts.phrases, "phrases");
  if (phrase_files.empty()) {
    throw ao::UsageError("build-ontology needs at least one phrases file");
  }
  std::string graph_path = s.str(opts.o_graph, opts.graph, "graph", "");
  std::string out = s.required(opts.o_out, opts.out, "out");
  double delta_g = s.num(opts.o_delta_g, opts.delta_g, "delta_g", 0.3);
  std::string lexicon = s.str(opts.o_lexicon, opts.lexicon, "lexicon", "");
  std::string stoplist = s.str(opts.o_stoplist, opts.stoplist, "stoplist", "");
  bool derive_suffixes =
      s.boolean(opts.o_suffixes, opts.derive_suffixes, "derive_suffixes", true);
  std::size_t min_frequency =
      s.size(opts.o_min_frequency, opts.min_frequency, "min_frequency", 3);
  bool derive_topics = s.boolean(opts.o_topics, opts.derive_topics, "derive_topics", true);
  long long min_search_count =
      s.integer(opts.o_min_search, opts.min_search_count, "min_search_count", 1);

  std::vector<ao::AttentionPhrase> phrases;
  for (const auto& file : phrase_files) {
    for (auto& p : ao::load_phrases(file)) phrases.push_back(std::move(p));
  }
  std::optional<ao::ClickGraph> graph;
  if (!graph_path.empty()) graph = ao::load_click_log(graph_path);
  ao::LexiconAnnotator annotator = make_annotator(lexicon, stoplist);

  ao::Ontology ontology;
  if (graph.has_value()) {
    std::set<std::string> categories;
    for (const auto& doc : graph->docs()) {
      if (doc.category.has_value() && !doc.category->empty()) {
        categories.insert(ao::normalize_text(*doc.category));
      }
    }
    for (const auto& category : categories) {
      ao::AttentionNodeRecord rec;
      rec.kind = ao::NodeKind::Category;
      rec.canonical = category;
      ontology.upsert_node(rec);
    }
  }
  for (const auto& phrase : phrases) {
    ao::AttentionNodeRecord rec;
    rec.kind = node_kind_for(phrase.kind);
    rec.canonical = phrase.text;
    rec.aliases = phrase.aliases;
    rec.support_count = static_cast<std::int64_t>(phrase.support_queries.size());
    if (phrase.kind == ao::PhraseKind::Event && graph.has_value()) {
      // Event time: earliest publication among the clicked support docs.
      std::optional<std::int64_t> earliest;
      for (const auto& doc_id : phrase.support_docs) {
        if (!graph->has_doc(doc_id)) continue;
        const ao::DocRecord& doc = graph->doc(doc_id);
        if (doc.publish_time.has_value() &&
            (!earliest.has_value() || *doc.publish_time < *earliest)) {
          earliest = doc.publish_time;
        }
      }
      rec.attributes.time = earliest;
    }
    ontology.upsert_node(rec);
  }

  std::vector<ao::LinkEdge> links;
  if (graph.has_value()) {
    for (const auto& phrase : phrases) {
      ao::CategoryLinkStats stats = ao::category_stats_for_phrase(phrase, *graph);
      if (stats.n_p < 1) continue;
      for (const auto& [category, prob] :
           ao::link_attention_category(stats, delta_g)) {
        links.push_back(ao::LinkEdge{category, phrase.text, ao::Relation::IsA,
                                     prob, "category-ratio"});
      }
    }
  }

  std::vector<ao::AttentionPhrase> linkable = phrases;
  if (derive_suffixes) {
    std::vector<std::string> concept_texts;
    for (const auto& p : phrases) {
      if (p.kind == ao::PhraseKind::Concept) concept_texts.push_back(p.text);
    }
    for (const auto& suffix :
         ao::common_suffix_discovery(concept_texts, min_frequency, annotator)) {
      ao::AttentionNodeRecord rec;
      rec.kind = ao::NodeKind::Concept;
      rec.canonical = suffix;
      ontology.upsert_node(rec);
      ao::AttentionPhrase broad;
      broad.text = suffix;
      broad.tokens = ao::text_terms(suffix);
      broad.kind = ao::PhraseKind::Concept;
      broad.enriched_repr = suffix;
      linkable.push_back(std::move(broad));
    }
  }
  for (auto& link : ao::link_isa_between_attentions(linkable, ontology)) {
    links.push_back(std::move(link));
  }
  ao::LinkReport report = ao::emit_links(ontology, links);

  std::vector<ao::AttentionPhrase> topics;
  for (const auto& p : linkable) {
    if (p.kind == ao::PhraseKind::Topic) topics.push_back(p);
  }
  if (derive_topics && graph.has_value()) {
    std::vector<std::string> event_texts;
    for (const auto& p : phrases) {
      if (p.kind == ao::PhraseKind::Event) event_texts.push_back(p.text);
    }
    std::map<std::string, std::int64_t> search_counts = graph->query_click_totals();
    std::vector<ao::LinkEdge> topic_links;
    for (const auto& topic : ao::common_pattern_discovery(
             event_texts, ontology, min_search_count, search_counts)) {
      ao::AttentionNodeRecord rec;
      rec.kind = ao::NodeKind::Topic;
      rec.canonical = topic.text;
      ontology.upsert_node(rec);
      for (const auto& member : topic.member_events) {
        topic_links.push_back(ao::LinkEdge{topic.text, member, ao::Relation::IsA,
                                           1.0, "cpd"});
      }
      ao::AttentionPhrase tp;
      tp.text = topic.text;
      tp.tokens = ao::text_terms(topic.text);
      tp.kind = ao::PhraseKind::Topic;
      tp.enriched_repr = topic.text;
      topics.push_back(std::move(tp));
    }
    ao::LinkReport topic_report = ao::emit_links(ontology, topic_links);
    report.accepted += topic_report.accepted;
    report.rejected += topic_report.rejected;
    report.missing_endpoints += topic_report.missing_endpoints;
  }

  std::vector<ao::AttentionPhrase> concepts;
  for (const auto& p : linkable) {
    if (p.kind == ao::PhraseKind::Concept) concepts.push_back(p);
  }
  ao::LinkReport involve_report = ao::emit_links(
      ontology, ao::link_involve_concept_topic(concepts, topics));
  report.accepted += involve_report.accepted;
  report.rejected += involve_report.rejected;
  report.missing_endpoints += involve_report.missing_endpoints;

  ao::AuditReport audit = ontology.audit();
  if (!audit.ok()) {
    throw ao::InvariantError("ontology audit failed after build: " +
                             audit.problems.front());
  }
  ao::save_ontology(ontology, out);
  std::cerr << "build-ontology: " << ontology.nodes().size() << " nodes, "
            << ontology.edges().size() << " edges (" << report.accepted
            << " accepted, " << report.rejected << " rejected, "
            << report.missing_endpoints << " missing endpoints)\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct LinkOpts {
  std::string ontology;
  std::string out;
  std::string graph;
  std::string sessions;
  std::string lexicon;
  std::string stoplist;
  long long seed = 1;
  double classifier_learning_rate = 0.5;
  long long classifier_epochs = 500;
  std::string elements_model;
  std::string elements_dataset;
  long long embed_dim = 16;
  double embed_margin = 1.0;
  long long embed_seed = 1;
  long long embed_epochs = 200;
  double embed_learning_rate = 0.1;
  long long negatives_per_positive = 5;
  double correlate_threshold = 0.0;
  CLI::Option* o_ontology = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_graph = nullptr;
  CLI::Option* o_sessions = nullptr;
  CLI::Option* o_lexicon = nullptr;
  CLI::Option* o_stoplist = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_classifier_lr = nullptr;
  CLI::Option* o_classifier_epochs = nullptr;
  CLI::Option* o_elements_model = nullptr;
  CLI::Option* o_elements_dataset = nullptr;
  CLI::Option* o_embed_dim = nullptr;
  CLI::Option* o_embed_margin = nullptr;
  CLI::Option* o_embed_seed = nullptr;
  CLI::Option* o_embed_epochs = nullptr;
  CLI::Option* o_embed_lr = nullptr;
  CLI::Option* o_negatives = nullptr;
  CLI::Option* o_correlate_threshold = nullptr;
};

int run_link(const Json& config, const LinkOpts& opts) {
  Settings s(config, "link");
  std::string ontology_path = s.required(opts.o_ontology, opts.ontology, "ontology");
  std::string out = s.required(opts.o_out, opts.out, "out");
  std::string graph_path = s.str(opts.o_graph, opts.graph, "graph", "");
  std::string sessions_path = s.str(opts.o_sessions, opts.sessions, "sessions", "");
  std::string lexicon = s.str(opts.o_lexicon, opts.lexicon, "lexicon", "");
  std::string stoplist = s.str(opts.o_stoplist, opts.stoplist, "stoplist", "");
  std::uint64_t seed =
      static_cast<std::uint64_t>(s.integer(opts.o_seed, opts.seed, "seed", 1));
  double classifier_lr = s.num(opts.o_classifier_lr, opts.classifier_learning_rate,
                               "classifier_learning_rate", 0.5);
  std::size_t classifier_epochs = s.size(
      opts.o_classifier_epochs, opts.classifier_epochs, "classifier_epochs", 500);
  std::string elements_model_path =
      s.str(opts.o_elements_model, opts.elements_model, "elements_model", "");
  std::string elements_dataset_path = s.str(
      opts.o_elements_dataset, opts.elements_dataset, "elements_dataset", "");
  ao::EmbedConfig embed;
  embed.dim = s.size(opts.o_embed_dim, opts.embed_dim, "embed_dim", 16);
  embed.margin = s.num(opts.o_embed_margin, opts.embed_margin, "embed_margin", 1.0);
  embed.seed = static_cast<std::uint64_t>(
      s.integer(opts.o_embed_seed, opts.embed_seed, "embed_seed", 1));
  embed.epochs = s.size(opts.o_embed_epochs, opts.embed_epochs, "embed_epochs", 200);
  embed.learning_rate =
      s.num(opts.o_embed_lr, opts.embed_learning_rate, "embed_learning_rate", 0.1);
  embed.negatives_per_positive = s.size(
      opts.o_negatives, opts.negatives_per_positive, "negatives_per_positive", 5);
  double correlate_threshold = s.num(
      opts.o_correlate_threshold, opts.correlate_threshold, "correlate_threshold", 0.0);

  ao::Ontology ontology = ao::load_ontology(ontology_path);
  ao::LinkReport report;
  auto merge_report = [&report](const ao::LinkReport& other) {
    report.accepted += other.accepted;
    report.rejected += other.rejected;
    report.missing_endpoints += other.missing_endpoints;
  };

  std::vector<std::vector<ao::SessionRecord>> sessions;
  if (!sessions_path.empty()) {
    sessions = ao::sessionize(ao::load_session_log(sessions_path));
  }

  // Concept-entity isA edges from weakly supervised evidence.
  if (!sessions_path.empty() && !graph_path.empty()) {
    ao::ClickGraph graph = ao::load_click_log(graph_path);
    std::vector<ao::SessionRecord> flat;
    for (const auto& session : sessions) {
      flat.insert(flat.end(), session.begin(), session.end());
    }
    std::vector<ao::ConceptEntityExample> dataset =
        ao::build_concept_entity_dataset(graph, flat, ontology, seed);
    if (!dataset.empty()) {
      ao::LexicalLogisticClassifier classifier(classifier_lr, classifier_epochs);
      classifier.train(dataset);
      std::map<std::pair<std::string, std::string>, double> accepted;
      for (const auto& example : dataset) {
        if (example.provenance == "synthetic-negative") continue;
        auto [label, score] = ao::classify_concept_entity(classifier, example);
        if (!label) continue;
        auto key = std::make_pair(example.concept_phrase, example.entity);
        auto it = accepted.find(key);
        if (it == accepted.end() || score > it->second) accepted[key] = score;
      }
      std::vector<ao::LinkEdge> links;
      for (const auto& [key, score] : accepted) {
        links.push_back(ao::LinkEdge{key.first, key.second, ao::Relation::IsA,
                                     score, "evidence"});
      }
      merge_report(ao::emit_links(ontology, links));
    }
  }

  // Event element recognition: involve edges plus event attributes.
  if (!elements_model_path.empty() && !elements_dataset_path.empty()) {
    ao::RgcnModel model = ao::load_rgcn(elements_model_path);
    ao::LexiconAnnotator annotator = make_annotator(lexicon, stoplist);
    std::vector<ao::LinkEdge> links;
    for (const auto& example : ao::load_dataset(elements_dataset_path)) {
      if (example.gold.empty()) continue;
      std::string event_text = ao::normalize_text(example.gold);
      if (ontology.find(ao::NodeKind::Event, event_text) == nullptr) continue;
      std::vector<ao::AnnotatedText> queries;
      std::vector<ao::AnnotatedText> titles;
      for (const auto& q : example.queries) queries.push_back(annotator.annotate(q));
      for (const auto& t : example.titles) titles.push_back(annotator.annotate(t));
      ao::InteractionGraph graph = ao::build_qtig(queries, titles);
      ao::ElementPrediction prediction = ao::recognize_event_elements(model, graph);
      for (const auto& entity : prediction.entities) {
        ao::AttentionNodeRecord rec;
        rec.kind = ao::NodeKind::Entity;
        rec.canonical = entity;
        ontology.upsert_node(rec);
      }
      ao::AttentionNodeRecord update;
      update.kind = ao::NodeKind::Event;
      update.canonical = event_text;
      update.attributes.entities = prediction.entities;
      update.attributes.trigger = ao::smart_join(prediction.triggers);
      update.attributes.location = ao::smart_join(prediction.locations);
      ontology.upsert_node(update);
      for (auto& link : ao::element_involve_edges(event_text, prediction)) {
        links.push_back(std::move(link));
      }
    }
    merge_report(ao::emit_links(ontology, links));
  }

  // Correlate edges from session co-occurrence embeddings.
  if (!sessions_path.empty()) {
    std::vector<std::pair<std::string, std::vector<std::string>>> entities;
    for (const auto& node : ontology.nodes()) {
      if (node.kind == ao::NodeKind::Entity) {
        entities.emplace_back(node.canonical, ao::text_terms(node.canonical));
      }
    }
    std::vector<std::pair<std::string, std::string>> positives;
    for (const auto& session : sessions) {
      std::set<std::string> mentioned;
      for (const auto& record : session) {
        std::vector<std::string> qtoks = ao::text_terms(record.query);
        for (const auto& [canonical, toks] : entities) {
          if (!toks.empty() && ao::is_contiguous_subsequence(toks, qtoks)) {
            mentioned.insert(canonical);
          }
        }
      }
      for (auto i = mentioned.begin(); i != mentioned.end(); ++i) {
        for (auto j = std::next(i); j != mentioned.end(); ++j) {
          positives.emplace_back(*i, *j);
        }
      }
    }
    if (!positives.empty()) {
      std::vector<std::string> names;
      for (const auto& [canonical, toks] : entities) {
        (void)toks;
        names.push_back(canonical);
      }
      ao::EmbedResult trained = ao::train_entity_embeddings(positives, names, embed);
      std::optional<double> cut;
      if (correlate_threshold > 0.0) cut = correlate_threshold;
      merge_report(ao::emit_links(ontology, ao::link_correlate(trained.embeddings, cut)));
    }
  }

  ao::AuditReport audit = ontology.audit();
  if (!audit.ok()) {
    throw ao::InvariantError("ontology audit failed after link: " +
                             audit.problems.front());
  }
  ao::save_ontology(ontology, out);
  std::cerr << "link: " << report.accepted << " accepted, " << report.rejected
            << " rejected, " << report.missing_endpoints
            << " missing endpoints\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct TagOpts {
  std::string ontology;
  std::string docs;
  std::string out;
  std::string mode = "both";
  std::string stoplist;
  double score_threshold = 0.0;
  double lcs_fraction = 0.8;
  double bow_threshold = 0.5;
  CLI::Option* o_ontology = nullptr;
  CLI::Option* o_docs = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_stoplist = nullptr;
  CLI::Option* o_score_threshold = nullptr;
  CLI::Option* o_lcs_fraction = nullptr;
  CLI::Option* o_bow_threshold = nullptr;
};

int run_tag(const Json& config, const TagOpts& opts) {
  Settings s(config, "tag");
  std::string ontology_path = s.required(opts.o_ontology, opts.ontology, "ontology");
  std::string docs_path = s.required(opts.o_docs, opts.docs, "docs");
  std::string out = s.required(opts.o_out, opts.out, "out");
  std::string mode = s.str(opts.o_mode, opts.mode, "mode", "both");
  if (mode != "concept" && mode != "event" && mode != "both") {
    throw ao::UsageError("tag mode must be concept, event, or both");
  }
  std::string stoplist_path = s.str(opts.o_stoplist, opts.stoplist, "stoplist", "");
  double score_threshold =
      s.num(opts.o_score_threshold, opts.score_threshold, "score_threshold", 0.0);
  double lcs_fraction =
      s.num(opts.o_lcs_fraction, opts.lcs_fraction, "lcs_fraction", 0.8);
  double bow_threshold =
      s.num(opts.o_bow_threshold, opts.bow_threshold, "bow_threshold", 0.5);

  ao::Ontology ontology = ao::load_ontology(ontology_path);
  ao::Stoplist stoplist;
  if (!stoplist_path.empty()) stoplist = ao::load_stoplist(stoplist_path);
  ao::BowCosineMatcher matcher(bow_threshold);

  std::vector<Json> recs;
  for (const auto& doc : load_doc_file(docs_path)) {
    std::vector<ao::TagEntry> tags;
    if (mode != "event") {
      ao::TagResult concepts = ao::tag_concepts(
          doc, ontology, stoplist_path.empty() ? nullptr : &stoplist,
          score_threshold, nullptr);
      tags.insert(tags.end(), concepts.tags.begin(), concepts.tags.end());
    }
    if (mode != "concept") {
      ao::TagResult events = ao::tag_events(doc, ontology, lcs_fraction, &matcher);
      tags.insert(tags.end(), events.tags.begin(), events.tags.end());
    }
    Json rec;
    rec["doc_id"] = doc.id;
    Json list = Json::array();
    for (const auto& tag : tags) {
      Json t;
      t["node_id"] = tag.node_id;
      t["score"] = tag.score;
      t["method"] = tag.method;
      list.push_back(std::move(t));
    }
    rec["tags"] = std::move(list);
    recs.push_back(std::move(rec));
  }
  ao::write_jsonl(out, recs);
  std::cerr << "tag: " << recs.size() << " docs\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct StoryTreeOpts {
  std::string ontology;
  std::string seed_event;
  std::string out;
  double cut = 1.5;
  long long dim = 64;
  double weight_semantic = 1.0;
  double weight_trigger = 1.0;
  double weight_entities = 1.0;
  CLI::Option* o_ontology = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_cut = nullptr;
  CLI::Option* o_dim = nullptr;
  CLI::Option* o_w_semantic = nullptr;
  CLI::Option* o_w_trigger = nullptr;
  CLI::Option* o_w_entities = nullptr;
};

int run_story_tree(const Json& config, const StoryTreeOpts& opts) {
  Settings s(config, "story-tree");
  std::string ontology_path = s.required(opts.o_ontology, opts.ontology, "ontology");
  std::string seed = s.required(opts.o_seed, opts.seed_event, "seed_event");
  std::string out = s.required(opts.o_out, opts.out, "out");
  ao::StoryTreeParams params;
  params.cut_threshold = s.num(opts.o_cut, opts.cut, "cut", 1.5);
  std::size_t dim = s.size(opts.o_dim, opts.dim, "dim", 64);
  params.weights.semantic =
      s.num(opts.o_w_semantic, opts.weight_semantic, "weight_semantic", 1.0);
  params.weights.trigger =
      s.num(opts.o_w_trigger, opts.weight_trigger, "weight_trigger", 1.0);
  params.weights.entities =
      s.num(opts.o_w_entities, opts.weight_entities, "weight_entities", 1.0);

  ao::Ontology ontology = ao::load_ontology(ontology_path);
  std::string seed_id = seed;
  if (!ontology.has_node(seed_id)) {
    const ao::AttentionNodeRecord* node =
        ontology.find_canonical(ao::normalize_text(seed));
    if (node == nullptr) {
      throw ao::DataError("no node with id or canonical text '" + seed + "'");
    }
    seed_id = node->id;
  }
  ao::HashedNgramEmbedder embedder(dim);
  ao::StoryTree tree = ao::build_story_tree(seed_id, ontology, embedder, params);

  Json doc;
  doc["root_label"] = tree.root_label;
  Json nodes = Json::array();
  for (const auto& node : tree.nodes) {
    Json n;
    n["event_id"] = node.event_id;
    n["time"] = node.time;
    if (node.parent.has_value()) {
      n["parent"] = *node.parent;
    } else {
      n["parent"] = nullptr;
    }
    n["branch"] = node.branch;
    n["doc_ids"] = node.doc_ids;
    nodes.push_back(std::move(n));
  }
  doc["nodes"] = std::move(nodes);
  ao::write_json_file(out, doc);
  std::cerr << "story-tree: " << tree.nodes.size() << " nodes\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct RewriteOpts {
  std::string ontology;
  std::string query;
  std::string out;
  CLI::Option* o_ontology = nullptr;
  CLI::Option* o_query = nullptr;
  CLI::Option* o_out = nullptr;
};

int run_rewrite(const Json& config, const RewriteOpts& opts) {
  Settings s(config, "rewrite");
  std::string ontology_path = s.required(opts.o_ontology, opts.ontology, "ontology");
  std::string query = s.required(opts.o_query, opts.query, "query");
  std::string out = s.str(opts.o_out, opts.out, "out", "");

  ao::Ontology ontology = ao::load_ontology(ontology_path);
  ao::QueryUnderstanding result = ao::understand_query(query, ontology);
  Json doc;
  doc["query"] = ao::normalize_text(query);
  doc["rewrites"] = result.rewrites;
  doc["recommendations"] = result.recommendations;
  if (out.empty()) {
    std::cout << doc.dump() << "\n";
    finish_stage(s, "");
  } else {
    ao::write_json_file(out, doc);
    finish_stage(s, out + ".run.json");
  }
  return 0;
}

struct EvalOpts {
  std::string mode = "phrase";
  std::string phrases;
  std::string truth;
  std::string model;
  std::string dataset;
  std::string lexicon;
  std::string stoplist;
  std::string out;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_phrases = nullptr;
  CLI::Option* o_truth = nullptr;
  CLI::Option* o_model = nullptr;
  CLI::Option* o_dataset = nullptr;
  CLI::Option* o_lexicon = nullptr;
  CLI::Option* o_stoplist = nullptr;
  CLI::Option* o_out = nullptr;
};

int run_eval(const Json& config, const EvalOpts& opts) {
  Settings s(config, "eval");
  std::string mode = s.str(opts.o_mode, opts.mode, "mode", "phrase");
  std::string out = s.required(opts.o_out, opts.out, "out");
  Json doc;
  if (mode == "phrase") {
    std::string phrases_path = s.required(opts.o_phrases, opts.phrases, "phrases");
    std::string truth_path = s.required(opts.o_truth, opts.truth, "truth");
    std::vector<ao::AttentionPhrase> phrases = ao::load_phrases(phrases_path);
    Json truth = ao::read_json_file(truth_path);
    if (!truth.contains("clusters") || !truth["clusters"].is_array()) {
      throw ao::DataError(truth_path + ": expected a 'clusters' array");
    }
    std::vector<std::string> predictions;
    std::vector<std::string> golds;
    for (const auto& cluster : truth["clusters"]) {
      std::string seed = ao::require_string(cluster, "seed_query_id", truth_path);
      golds.push_back(ao::require_string(cluster, "gold", truth_path));
      std::string pred;
      for (const auto& phrase : phrases) {
        if (phrase.support_queries.count(seed) > 0) {
          pred = phrase.text;
          break;
        }
      }
      predictions.push_back(pred);
    }
    ao::PhraseEvalReport report = ao::phrase_metrics(predictions, golds);
    doc["mode"] = "phrase";
    doc["n"] = predictions.size();
    doc["em"] = report.em;
    doc["f1"] = report.f1;
    doc["coverage"] = report.coverage;
  } else if (mode == "element") {
    std::string model_path = s.required(opts.o_model, opts.model, "model");
    std::string dataset_path = s.required(opts.o_dataset, opts.dataset, "dataset");
    std::string lexicon = s.str(opts.o_lexicon, opts.lexicon, "lexicon", "");
    std::string stoplist = s.str(opts.o_stoplist, opts.stoplist, "stoplist", "");
    ao::RgcnModel model = ao::load_rgcn(model_path);
    ao::LexiconAnnotator annotator = make_annotator(lexicon, stoplist);
    std::vector<int> pred;
    std::vector<int> gold;
    for (const auto& example : ao::load_dataset(dataset_path)) {
      ao::TrainExample te = ao::make_train_example(example, annotator, true);
      std::vector<int> classes = ao::predict_classes(ao::rgcn_forward(model, te.graph));
      for (std::size_t i = 2; i < te.graph.nodes.size(); ++i) {
        pred.push_back(classes[i]);
        gold.push_back(te.labels[i]);
      }
    }
    ao::MulticlassReport report = ao::multiclass_metrics(
        pred, gold, {ao::kClassOther, ao::kClassEntity, ao::kClassTrigger,
                     ao::kClassLocation});
    doc["mode"] = "element";
    doc["n"] = pred.size();
    doc["f1_micro"] = report.f1_micro;
    doc["f1_macro"] = report.f1_macro;
    doc["f1_weighted"] = report.f1_weighted;
  } else {
    throw ao::UsageError("eval mode must be phrase or element");
  }
  ao::write_json_file(out, doc);
  std::cerr << "eval " << doc.dump() << "\n";
  finish_stage(s, out + ".run.json");
  return 0;
}

struct AuditOpts {
  std::string ontology;
  CLI::Option* o_ontology = nullptr;
};

int run_audit(const Json& config, const AuditOpts& opts) {
  Settings s(config, "audit");
  std::string ontology_path = s.required(opts.o_ontology, opts.ontology, "ontology");
  ao::Ontology ontology = ao::load_ontology(ontology_path);
  ao::AuditReport report = ontology.audit();
  finish_stage(s, "");
  if (!report.ok()) {
    for (const auto& problem : report.problems) {
      std::cerr << "audit: " << problem << "\n";
    }
    std::cout << "audit: " << report.problems.size() << " violations\n";
    return 3;
  }
  std::cout << "audit: ok, " << ontology.nodes().size() << " nodes, "
            << ontology.edges().size() << " edges\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attention ontology toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file with per-stage sections");

  SynthOpts synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a planted synthetic corpus");
  synth.o_seed = synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth.o_clusters = synth_cmd->add_option("--clusters", synth.clusters, "cluster count");
  synth.o_queries = synth_cmd->add_option("--queries-per-cluster", synth.queries_per_cluster, "queries per cluster");
  synth.o_docs = synth_cmd->add_option("--docs-per-cluster", synth.docs_per_cluster, "docs per cluster");
  synth.o_noise = synth_cmd->add_option("--noise", synth.noise, "corruption rate in [0,1]");
  synth.o_kind = synth_cmd->add_option("--kind", synth.kind, "concept or event");
  synth.o_min = synth_cmd->add_option("--phrase-min", synth.phrase_min, "min phrase tokens");
  synth.o_max = synth_cmd->add_option("--phrase-max", synth.phrase_max, "max phrase tokens");
  synth.o_out = synth_cmd->add_option("--out-dir", synth.out_dir, "output directory");

  PathPair ingest;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "load a click log into a canonical graph file");
  ingest.o_in = ingest_cmd->add_option("--log", ingest.in, "click log JSONL");
  ingest.o_out = ingest_cmd->add_option("--out", ingest.out, "canonical graph JSONL");

  ClusterOpts cluster;
  CLI::App* cluster_cmd = app.add_subcommand("cluster", "seeded random-walk clustering");
  cluster.o_graph = cluster_cmd->add_option("--graph", cluster.graph, "click graph JSONL");
  cluster.o_out = cluster_cmd->add_option("--out", cluster.out, "clusters JSONL");
  cluster.o_stoplist = cluster_cmd->add_option("--stoplist", cluster.stoplist, "stopword file");
  cluster.o_seeds = cluster_cmd->add_option("--seeds", cluster.seeds, "comma-separated seed query ids (default all)");
  cluster.o_restart = cluster_cmd->add_option("--restart", cluster.restart, "restart probability");
  cluster.o_max_iterations = cluster_cmd->add_option("--max-iterations", cluster.max_iterations, "power iteration cap");
  cluster.o_epsilon = cluster_cmd->add_option("--epsilon", cluster.epsilon, "convergence epsilon");
  cluster.o_visit = cluster_cmd->add_option("--visit-threshold", cluster.visit_threshold, "visit probability floor");
  cluster.o_overlap = cluster_cmd->add_option("--overlap", cluster.overlap, "query keep share");

  TrainOpts train;
  CLI::App* train_cmd = app.add_subcommand("train", "train the node classifier");
  train.o_dataset = train_cmd->add_option("--dataset", train.dataset, "dataset JSONL");
  train.o_out = train_cmd->add_option("--out", train.out, "model checkpoint path");
  train.o_lexicon = train_cmd->add_option("--lexicon", train.lexicon, "lexicon TSV");
  train.o_stoplist = train_cmd->add_option("--stoplist", train.stoplist, "stopword file");
  train.o_elements = train_cmd->add_flag("--elements", train.elements, "4-class element labels");
  train.o_hidden = train_cmd->add_option("--hidden", train.hidden, "hidden width");
  train.o_layers = train_cmd->add_option("--layers", train.layers, "layer count");
  train.o_bases = train_cmd->add_option("--bases", train.bases, "basis count");
  train.o_classes = train_cmd->add_option("--classes", train.classes, "class count (0 = auto)");
  train.o_epochs = train_cmd->add_option("--epochs", train.epochs, "training epochs");
  train.o_lr = train_cmd->add_option("--learning-rate", train.learning_rate, "SGD step size");
  train.o_seed = train_cmd->add_option("--seed", train.seed, "init seed");

  MineOpts mine;
  CLI::App* mine_cmd = app.add_subcommand("mine", "mine attention phrases from clusters");
  mine.o_graph = mine_cmd->add_option("--graph", mine.graph, "click graph JSONL");
  mine.o_clusters = mine_cmd->add_option("--clusters", mine.clusters, "clusters JSONL");
  mine.o_model = mine_cmd->add_option("--model", mine.model, "model checkpoint");
  mine.o_out = mine_cmd->add_option("--out", mine.out, "phrases JSONL");
  mine.o_kind = mine_cmd->add_option("--kind", mine.kind, "concept, event, or topic");
  mine.o_lexicon = mine_cmd->add_option("--lexicon", mine.lexicon, "lexicon TSV");
  mine.o_stoplist = mine_cmd->add_option("--stoplist", mine.stoplist, "stopword file");
  mine.o_synonyms = mine_cmd->add_option("--synonyms", mine.synonyms, "synonym groups TSV");
  mine.o_delta_m = mine_cmd->add_option("--delta-m", mine.delta_m, "merge threshold");
  mine.o_atsp_exact = mine_cmd->add_option("--atsp-exact-threshold", mine.atsp_exact_threshold, "exact solver size cap");
  mine.o_atsp_seed = mine_cmd->add_option("--atsp-seed", mine.atsp_seed, "heuristic seed");
  mine.o_atsp_restarts = mine_cmd->add_option("--atsp-restarts", mine.atsp_restarts, "heuristic restarts");

  BuildOntologyOpts build;
  CLI::App* build_cmd = app.add_subcommand("build-ontology", "assemble nodes and baseline links");
  build.o_phrases = build_cmd->add_option("--phrases", build.phrases, "phrases JSONL (repeatable)");
  build.o_graph = build_cmd->add_option("--graph", build.graph, "click graph JSONL for category links");
  build.o_out = build_cmd->add_option("--out", build.out, "ontology JSONL");
  build.o_delta_g = build_cmd->add_option("--delta-g", build.delta_g, "category link threshold");
  build.o_lexicon = build_cmd->add_option("--lexicon", build.lexicon, "lexicon TSV");
  build.o_stoplist = build_cmd->add_option("--stoplist", build.stoplist, "stopword file");
  build.o_suffixes = build_cmd->add_flag("--derive-suffixes,!--no-derive-suffixes", build.derive_suffixes, "derive broader suffix concepts");
  build.o_min_frequency = build_cmd->add_option("--min-frequency", build.min_frequency, "suffix support floor");
  build.o_topics = build_cmd->add_flag("--derive-topics,!--no-derive-topics", build.derive_topics, "derive topics from event patterns");
  build.o_min_search = build_cmd->add_option("--min-search-count", build.min_search_count, "topic search count floor");

  LinkOpts link;
  CLI::App* link_cmd = app.add_subcommand("link", "add evidence, element, and correlate edges");
  link.o_ontology = link_cmd->add_option("--ontology", link.ontology, "input ontology JSONL");
  link.o_out = link_cmd->add_option("--out", link.out, "output ontology JSONL");
  link.o_graph = link_cmd->add_option("--graph", link.graph, "click graph JSONL");
  link.o_sessions = link_cmd->add_option("--sessions", link.sessions, "session log JSONL");
  link.o_lexicon = link_cmd->add_option("--lexicon", link.lexicon, "lexicon TSV");
  link.o_stoplist = link_cmd->add_option("--stoplist", link.stoplist, "stopword file");
  link.o_seed = link_cmd->add_option("--seed", link.seed, "dataset build seed");
  link.o_classifier_lr = link_cmd->add_option("--classifier-learning-rate", link.classifier_learning_rate, "evidence classifier step size");
  link.o_classifier_epochs = link_cmd->add_option("--classifier-epochs", link.classifier_epochs, "evidence classifier epochs");
  link.o_elements_model = link_cmd->add_option("--elements-model", link.elements_model, "4-class model checkpoint");
  link.o_elements_dataset = link_cmd->add_option("--elements-dataset", link.elements_dataset, "event dataset JSONL");
  link.o_embed_dim = link_cmd->add_option("--embed-dim", link.embed_dim, "entity embedding width");
  link.o_embed_margin = link_cmd->add_option("--embed-margin", link.embed_margin, "hinge margin");
  link.o_embed_seed = link_cmd->add_option("--embed-seed", link.embed_seed, "embedding init seed");
  link.o_embed_epochs = link_cmd->add_option("--embed-epochs", link.embed_epochs, "embedding epochs");
  link.o_embed_lr = link_cmd->add_option("--embed-learning-rate", link.embed_learning_rate, "embedding step size");
  link.o_negatives = link_cmd->add_option("--negatives-per-positive", link.negatives_per_positive, "sampled negatives per positive");
  link.o_correlate_threshold = link_cmd->add_option("--correlate-threshold", link.correlate_threshold, "distance cut (0 = margin/2)");

  TagOpts tag;
  CLI::App* tag_cmd = app.add_subcommand("tag", "tag documents with concepts and events");
  tag.o_ontology = tag_cmd->add_option("--ontology", tag.ontology, "ontology JSONL");
  tag.o_docs = tag_cmd->add_option("--docs", tag.docs, "documents JSONL");
  tag.o_out = tag_cmd->add_option("--out", tag.out, "tags JSONL");
  tag.o_mode = tag_cmd->add_option("--mode", tag.mode, "concept, event, or both");
  tag.o_stoplist = tag_cmd->add_option("--stoplist", tag.stoplist, "stopword file");
  tag.o_score_threshold = tag_cmd->add_option("--score-threshold", tag.score_threshold, "concept tag floor");
  tag.o_lcs_fraction = tag_cmd->add_option("--lcs-fraction", tag.lcs_fraction, "event LCS floor");
  tag.o_bow_threshold = tag_cmd->add_option("--bow-threshold", tag.bow_threshold, "event cosine gate");

  StoryTreeOpts story;
  CLI::App* story_cmd = app.add_subcommand("story-tree", "grow a story tree from a seed event");
  story.o_ontology = story_cmd->add_option("--ontology", story.ontology, "ontology JSONL");
  story.o_seed = story_cmd->add_option("--seed-event", story.seed_event, "event node id or canonical text");
  story.o_out = story_cmd->add_option("--out", story.out, "tree JSON");
  story.o_cut = story_cmd->add_option("--cut", story.cut, "average-linkage cut");
  story.o_dim = story_cmd->add_option("--dim", story.dim, "phrase embedding width");
  story.o_w_semantic = story_cmd->add_option("--weight-semantic", story.weight_semantic, "semantic term weight");
  story.o_w_trigger = story_cmd->add_option("--weight-trigger", story.weight_trigger, "trigger term weight");
  story.o_w_entities = story_cmd->add_option("--weight-entities", story.weight_entities, "entity term weight");

  RewriteOpts rewrite;
  CLI::App* rewrite_cmd = app.add_subcommand("rewrite", "rewrite a query against the ontology");
  rewrite.o_ontology = rewrite_cmd->add_option("--ontology", rewrite.ontology, "ontology JSONL");
  rewrite.o_query = rewrite_cmd->add_option("--query", rewrite.query, "query text");
  rewrite.o_out = rewrite_cmd->add_option("--out", rewrite.out, "output JSON (default stdout)");

  EvalOpts eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score mined phrases or element recognition");
  eval.o_mode = eval_cmd->add_option("--mode", eval.mode, "phrase or element");
  eval.o_phrases = eval_cmd->add_option("--phrases", eval.phrases, "mined phrases JSONL");
  eval.o_truth = eval_cmd->add_option("--truth", eval.truth, "planted truth JSON");
  eval.o_model = eval_cmd->add_option("--model", eval.model, "model checkpoint");
  eval.o_dataset = eval_cmd->add_option("--dataset", eval.dataset, "dataset JSONL");
  eval.o_lexicon = eval_cmd->add_option("--lexicon", eval.lexicon, "lexicon TSV");
  eval.o_stoplist = eval_cmd->add_option("--stoplist", eval.stoplist, "stopword file");
  eval.o_out = eval_cmd->add_option("--out", eval.out, "report JSON");

  AuditOpts audit;
  CLI::App* audit_cmd = app.add_subcommand("audit", "check ontology invariants");
  audit.o_ontology = audit_cmd->add_option("--ontology", audit.ontology, "ontology JSONL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Json config = Json::object();
    if (!config_path.empty()) {
      try {
        config = ao::read_json_file(config_path);
      } catch (const ao::Error& e) {
        throw ao::UsageError(e.what());
      }
      validate_config(config, config_path);
    }
    if (app.got_subcommand(synth_cmd)) return run_synth(config, synth);
    if (app.got_subcommand(ingest_cmd)) return run_ingest(config, ingest);
    if (app.got_subcommand(cluster_cmd)) return run_cluster(config, cluster);
    if (app.got_subcommand(train_cmd)) return run_train(config, train);
    if (app.got_subcommand(mine_cmd)) return run_mine(config, mine);
    if (app.got_subcommand(build_cmd)) return run_build_ontology(config, build);
    if (app.got_subcommand(link_cmd)) return run_link(config, link);
    if (app.got_subcommand(tag_cmd)) return run_tag(config, tag);
    if (app.got_subcommand(story_cmd)) return run_story_tree(config, story);
    if (app.got_subcommand(rewrite_cmd)) return run_rewrite(config, rewrite);
    if (app.got_subcommand(eval_cmd)) return run_eval(config, eval);
    if (app.got_subcommand(audit_cmd)) return run_audit(config, audit);
    throw ao::UsageError("no command given");
  } catch (const ao::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ao::InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ao::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
