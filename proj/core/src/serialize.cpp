#include "bookml/serialize.hpp"

#include <cmath>
#include <limits>

#include "bookml/error.hpp"
#include "json.hpp"

namespace bookml {

namespace {

using json = nlohmann::json;

constexpr int kVersion = 1;

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw_data("invalid number '" + s + "'");
  }
  if (!j.is_number()) throw_data("expected a number");
  return j.get<double>();
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> to_nums(const json& j) {
  if (!j.is_array()) throw_data("expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(to_num(x));
  return v;
}

json header(std::string_view format) { return json{{"format", format}, {"version", kVersion}}; }

void check_header(const json& j, std::string_view format) {
  if (!j.is_object()) throw_data("document is not a JSON object");
  if (j.value("format", std::string()) != format) throw_data("expected a " + std::string(format) + " document");
  const int v = j.at("version").get<int>();
  if (v < 1 || v > kVersion) throw_data("unsupported " + std::string(format) + " version " + std::to_string(v));
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw_data(std::string("malformed JSON: ") + e.what());
  }
}

// Runs a decoder, translating library errors into data errors.
template <class F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw_data("corrupt " + std::string(what) + ": " + e.what());
  }
}

// --- pipeline ---------------------------------------------------------------

std::string mode_name(LabelMode m) { return m == LabelMode::Binary ? "binary" : "multiclass"; }

LabelMode mode_from(const std::string& s) {
  if (s == "binary") return LabelMode::Binary;
  if (s == "multiclass") return LabelMode::Multiclass;
  throw_data("unknown label mode '" + s + "'");
}

json blocks_json(const BlockMap& blocks) {
  json a = json::array();
  for (const auto& b : blocks) a.push_back({{"name", b.name}, {"offset", b.offset}, {"length", b.length}});
  return a;
}

BlockMap blocks_from(const json& j) {
  BlockMap blocks;
  for (const auto& b : j) {
    blocks.push_back(Block{b.at("name").get<std::string>(), b.at("offset").get<std::size_t>(),
                           b.at("length").get<std::size_t>()});
  }
  return blocks;
}

json stage_json(const FittedStage& s) {
  json j{{"kind", stage_kind(s)}};
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, fitted::VectorAssembler>) {
          j["inputs"] = f.spec.inputs;
          j["output"] = f.spec.output;
          j["blocks"] = blocks_json(f.blocks);
        } else {
          j["input"] = f.spec.input;
          j["output"] = f.spec.output;
        }
        if constexpr (std::is_same_v<T, fitted::StopWordsRemover>) {
          j["stopwords"] = f.spec.stopwords;
        } else if constexpr (std::is_same_v<T, fitted::CountVectorizer>) {
          j["vocab_size"] = f.spec.vocab_size;
          j["min_df"] = f.spec.min_df;
          j["terms"] = f.vocabulary.terms();
          j["doc_freq"] = f.vocabulary.doc_freq();
          j["corpus_size"] = f.vocabulary.corpus_size();
        } else if constexpr (std::is_same_v<T, fitted::Idf>) {
          j["doc_freq"] = f.doc_freq;
          j["corpus_size"] = f.corpus_size;
          j["weights"] = nums(f.weights);
        } else if constexpr (std::is_same_v<T, fitted::MinMaxScaler>) {
          j["min"] = num(f.state.min);
          j["max"] = num(f.state.max);
        } else if constexpr (std::is_same_v<T, fitted::Labeler>) {
          j["mode"] = mode_name(f.spec.mode);
        }
      },
      s);
  return j;
}

FittedStage stage_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto in = [&] { return j.at("input").get<std::string>(); };
  const auto out = j.at("output").get<std::string>();
  if (kind == "tokenizer") return fitted::Tokenizer{{in(), out}};
  if (kind == "stopwords") {
    return fitted::StopWordsRemover{{in(), out, j.at("stopwords").get<std::vector<std::string>>()}};
  }
  if (kind == "count_vectorizer") {
    return fitted::CountVectorizer{
        {in(), out, j.at("vocab_size").get<std::size_t>(), j.at("min_df").get<std::size_t>()},
        Vocabulary(j.at("terms").get<std::vector<std::string>>(), j.at("doc_freq").get<std::vector<std::size_t>>(),
                   j.at("corpus_size").get<std::size_t>())};
  }
  if (kind == "idf") {
    fitted::Idf f{{in(), out}, j.at("doc_freq").get<std::vector<std::size_t>>(),
                  j.at("corpus_size").get<std::size_t>(), to_nums(j.at("weights"))};
    if (f.weights.size() != f.doc_freq.size()) throw_data("idf weights and doc_freq differ in length");
    return f;
  }
  if (kind == "minmax") return fitted::MinMaxScaler{{in(), out}, MinMaxState{to_num(j.at("min")), to_num(j.at("max"))}};
  if (kind == "assembler") {
    return fitted::VectorAssembler{{j.at("inputs").get<std::vector<std::string>>(), out}, blocks_from(j.at("blocks"))};
  }
  if (kind == "labeler") return fitted::Labeler{{in(), out, mode_from(j.at("mode").get<std::string>())}};
  throw_data("unknown pipeline stage kind '" + kind + "'");
}

json pipeline_json(const PipelineModel& p) {
  json j = header("bookml-pipeline");
  json stages = json::array();
  for (const auto& s : p.stages()) stages.push_back(stage_json(s));
  j["stages"] = std::move(stages);
  if (const auto blocks = p.block_map()) j["blocks"] = blocks_json(*blocks);
  return j;
}

PipelineModel pipeline_from(const json& j) {
  check_header(j, "bookml-pipeline");
  std::vector<FittedStage> stages;
  for (const auto& s : j.at("stages")) stages.push_back(stage_from(s));
  return PipelineModel(std::move(stages));
}

// --- models -----------------------------------------------------------------

json tree_node_json(const DecisionTree& t, std::int32_t idx) {
  if (idx < 0 || static_cast<std::size_t>(idx) >= t.nodes.size()) throw_data("tree child index out of range");
  const auto& n = t.nodes[static_cast<std::size_t>(idx)];
  json j{{"n", n.n_samples}};
  if (n.leaf && t.num_classes > 0) {
    j["distribution"] = nums(n.distribution);
  } else if (n.leaf) {
    j["value"] = num(n.value);
  } else {
    j["feature"] = n.feature;
    j["threshold"] = num(n.threshold);
    j["gain"] = num(n.impurity_gain);
    j["left"] = tree_node_json(t, n.left);
    j["right"] = tree_node_json(t, n.right);
  }
  return j;
}

std::int32_t tree_node_from(const json& j, DecisionTree& t, std::size_t depth) {
  if (depth > 512) throw_data("tree nesting too deep");
  const auto idx = static_cast<std::int32_t>(t.nodes.size());
  t.nodes.emplace_back();
  TreeNode n;
  n.n_samples = j.at("n").get<std::uint64_t>();
  if (!j.contains("left") && t.num_classes > 0) {
    n.distribution = to_nums(j.at("distribution"));
    if (n.distribution.size() != static_cast<std::size_t>(t.num_classes)) throw_data("leaf distribution size");
  } else if (!j.contains("left")) {
    n.value = to_num(j.at("value"));
  } else {
    n.leaf = false;
    n.feature = j.at("feature").get<std::uint32_t>();
    if (n.feature >= t.dimension) throw_data("split feature out of range");
    n.threshold = to_num(j.at("threshold"));
    n.impurity_gain = to_num(j.at("gain"));
    n.left = tree_node_from(j.at("left"), t, depth + 1);
    n.right = tree_node_from(j.at("right"), t, depth + 1);
  }
  t.nodes[static_cast<std::size_t>(idx)] = std::move(n);
  return idx;
}

json tree_json(const DecisionTree& t) {
  if (t.nodes.empty()) throw_data("cannot serialize an empty tree");
  return json{{"num_classes", t.num_classes}, {"dimension", t.dimension}, {"root", tree_node_json(t, 0)}};
}

DecisionTree tree_from(const json& j) {
  DecisionTree t;
  t.num_classes = j.at("num_classes").get<int>();
  t.dimension = j.at("dimension").get<std::size_t>();
  if (t.num_classes < 0) throw_data("negative class count");
  tree_node_from(j.at("root"), t, 0);
  return t;
}

json trees_json(const std::vector<DecisionTree>& trees) {
  json a = json::array();
  for (const auto& t : trees) a.push_back(tree_json(t));
  return a;
}

std::vector<DecisionTree> trees_from(const json& j) {
  std::vector<DecisionTree> trees;
  for (const auto& t : j) trees.push_back(tree_from(t));
  return trees;
}

json model_json(const ClassifierModel& m) {
  json j = header("bookml-model");
  j["kind"] = model_kind(m);
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          j["num_classes"] = model.num_classes;
          j["dimension"] = model.dimension;
          json rows = json::array();
          for (std::size_t k = 0; k < model.rows(); ++k) {
            const auto r = model.row(k);
            rows.push_back(nums(std::vector<double>(r.begin(), r.end())));
          }
          j["weights"] = std::move(rows);
          j["intercepts"] = nums(model.intercepts);
          j["iterations"] = model.iterations;
          j["final_objective"] = num(model.final_objective);
          j["objective_trace"] = nums(model.objective_trace);
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          j["tree"] = tree_json(model);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          j["num_classes"] = model.num_classes;
          j["seed"] = model.seed;
          j["trees"] = trees_json(model.trees);
        } else {
          j["initial_score"] = num(model.initial_score);
          j["learning_rate"] = num(model.learning_rate);
          j["dimension"] = model.dimension;
          j["train_log_loss"] = nums(model.train_log_loss);
          j["trees"] = trees_json(model.trees);
        }
      },
      m);
  return j;
}

ClassifierModel model_from(const json& j) {
  check_header(j, "bookml-model");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "logistic" || kind == "svc") {
    LinearModel m;
    m.kind = kind == "svc" ? LinearKind::Svc : LinearKind::Logistic;
    m.num_classes = j.at("num_classes").get<int>();
    m.dimension = j.at("dimension").get<std::size_t>();
    for (const auto& row : j.at("weights")) {
      const auto r = to_nums(row);
      if (r.size() != m.dimension) throw_data("weight row length differs from dimension");
      m.weights.insert(m.weights.end(), r.begin(), r.end());
    }
    m.intercepts = to_nums(j.at("intercepts"));
    if (m.intercepts.size() * m.dimension != m.weights.size()) throw_data("weight rows and intercepts differ");
    m.iterations = j.at("iterations").get<std::size_t>();
    m.final_objective = to_num(j.at("final_objective"));
    m.objective_trace = to_nums(j.at("objective_trace"));
    return m;
  }
  if (kind == "decision_tree") return tree_from(j.at("tree"));
  if (kind == "random_forest") {
    ForestModel f;
    f.num_classes = j.at("num_classes").get<int>();
    f.seed = j.at("seed").get<std::uint64_t>();
    f.trees = trees_from(j.at("trees"));
    return f;
  }
  if (kind == "gbt") {
    GBTModel g;
    g.initial_score = to_num(j.at("initial_score"));
    g.learning_rate = to_num(j.at("learning_rate"));
    g.dimension = j.at("dimension").get<std::size_t>();
    g.train_log_loss = to_nums(j.at("train_log_loss"));
    g.trees = trees_from(j.at("trees"));
    return g;
  }
  throw_data("unknown model kind '" + kind + "'");
}

}  // namespace

std::string_view model_kind(const ClassifierModel& m) {
  return std::visit(
      [](const auto& model) -> std::string_view {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return model.kind == LinearKind::Svc ? "svc" : "logistic";
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          return "decision_tree";
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          return "random_forest";
        } else {
          return "gbt";
        }
      },
      m);
}

std::string pipeline_to_json(const PipelineModel& p) { return pipeline_json(p).dump(); }

PipelineModel pipeline_from_json(std::string_view text) {
  return guarded("pipeline", [&] { return pipeline_from(parse(text)); });
}

std::string model_to_json(const ClassifierModel& m) { return model_json(m).dump(); }

ClassifierModel model_from_json(std::string_view text) {
  return guarded("model", [&] { return model_from(parse(text)); });
}

std::string factor_model_to_json(const FactorModel& m) {
  json j = header("bookml-factor-model");
  j["rank"] = m.rank;
  j["global_mean"] = num(m.global_mean);
  j["user_ids"] = m.user_ids;
  j["item_ids"] = m.item_ids;
  j["user_factors"] = nums(m.user_factors);
  j["item_factors"] = nums(m.item_factors);
  j["item_popularity"] = m.item_popularity;
  j["config"] = {{"rank", m.config.rank},           {"reg", num(m.config.reg)},
                 {"max_sweeps", m.config.max_sweeps}, {"alpha", num(m.config.alpha)},
                 {"implicit", m.config.implicit},   {"seed", m.config.seed}};
  j["objective_trace"] = nums(m.objective_trace);
  return j.dump();
}

FactorModel factor_model_from_json(std::string_view text) {
  return guarded("factor model", [&] {
    const json j = parse(text);
    check_header(j, "bookml-factor-model");
    FactorModel m;
    m.rank = j.at("rank").get<std::size_t>();
    m.global_mean = to_num(j.at("global_mean"));
    m.user_ids = j.at("user_ids").get<std::vector<std::string>>();
    m.item_ids = j.at("item_ids").get<std::vector<std::string>>();
    m.user_factors = to_nums(j.at("user_factors"));
    m.item_factors = to_nums(j.at("item_factors"));
    m.item_popularity = j.at("item_popularity").get<std::vector<std::uint64_t>>();
    if (m.user_factors.size() != m.user_ids.size() * m.rank || m.item_factors.size() != m.item_ids.size() * m.rank ||
        m.item_popularity.size() != m.item_ids.size()) {
      throw_data("factor matrix shapes do not match the id maps");
    }
    const auto& c = j.at("config");
    m.config.rank = c.at("rank").get<std::size_t>();
    m.config.reg = to_num(c.at("reg"));
    m.config.max_sweeps = c.at("max_sweeps").get<std::size_t>();
    m.config.alpha = to_num(c.at("alpha"));
    m.config.implicit = c.at("implicit").get<bool>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.objective_trace = to_nums(j.at("objective_trace"));
    m.index_ids();
    return m;
  });
}

std::string bundle_to_json(const ModelBundle& b) {
  json j = header("bookml-bundle");
  j["pipeline"] = pipeline_json(b.pipeline);
  j["model"] = model_json(b.model);
  j["metadata"] = b.metadata;
  return j.dump(1);
}

ModelBundle bundle_from_json(std::string_view text) {
  return guarded("bundle", [&] {
    const json j = parse(text);
    check_header(j, "bookml-bundle");
    return ModelBundle{pipeline_from(j.at("pipeline")), model_from(j.at("model")),
                       j.value("metadata", std::map<std::string, std::string>{})};
  });
}

}  // namespace bookml
