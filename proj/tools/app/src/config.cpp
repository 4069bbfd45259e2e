#include "bookml/app/config.hpp"

#include <fstream>
#include <sstream>

#include "bookml/error.hpp"
#include "json.hpp"

namespace bookml::app {

namespace {

using json = nlohmann::json;

constexpr std::pair<ModelName, std::string_view> kModelNames[] = {
    {ModelName::Logistic, "logistic"},   {ModelName::Svc, "svc"}, {ModelName::DecisionTree, "dtree"},
    {ModelName::RandomForest, "rforest"}, {ModelName::Gbt, "gbt"}, {ModelName::Als, "als"},
    {ModelName::AlsImplicit, "als_implicit"}};

LabelMode label_mode_from(const std::string& s) {
  if (s == "multiclass") return LabelMode::Multiclass;
  if (s == "binary") return LabelMode::Binary;
  throw_config("label_mode must be multiclass or binary, got '" + s + "'");
}

ParamValue param_from(const json& v, const std::string& axis) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw_config("grid axis '" + axis + "' holds a value that is not a number or string");
}

json param_json(const ParamValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

}  // namespace

std::string_view to_string(ModelName m) {
  for (const auto& [k, name] : kModelNames) {
    if (k == m) return name;
  }
  return "?";
}

ModelName model_from_string(std::string_view s) {
  for (const auto& [k, name] : kModelNames) {
    if (name == s) return k;
  }
  throw_config("unknown model '" + std::string(s) + "' (logistic, svc, dtree, rforest, gbt, als, als_implicit)");
}

bool is_factor_model(ModelName m) { return m == ModelName::Als || m == ModelName::AlsImplicit; }

std::filesystem::path RunConfig::prepared_dir() const { return prepared ? *prepared : out / "prepare" / "table"; }

std::filesystem::path RunConfig::command_dir(std::string_view command) const { return out / std::string(command); }

RunConfig config_from_json(std::string_view text, RunConfig cfg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_config(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw_config("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "ratings_path") cfg.ratings_path = v.get<std::string>();
      else if (key == "books_path") cfg.books_path = v.get<std::string>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "prepared") cfg.prepared = v.get<std::string>();
      else if (key == "sample_rows") cfg.sample_rows = v.is_null() ? std::nullopt : std::optional(v.get<std::size_t>());
      else if (key == "max_malformed_fraction") cfg.max_malformed_fraction = v.get<double>();
      else if (key == "label_mode") cfg.label_mode = label_mode_from(v.get<std::string>());
      else if (key == "model") cfg.model = model_from_string(v.get<std::string>());
      else if (key == "tuning") cfg.tuning = v.get<std::string>();
      else if (key == "folds") cfg.folds = v.get<std::size_t>();
      else if (key == "train_ratio") cfg.train_ratio = v.get<double>();
      else if (key == "test_fraction") cfg.test_fraction = v.get<double>();
      else if (key == "metric") cfg.metric = metric_from_string(v.get<std::string>());
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "threads") cfg.threads = v.get<std::size_t>();
      else if (key == "vocab_size") cfg.vocab_size = v.get<std::size_t>();
      else if (key == "min_df") cfg.min_df = v.get<std::size_t>();
      else if (key == "use_review_text") cfg.use_review_text = v.get<bool>();
      else if (key == "als_rank") cfg.als_rank = v.get<std::size_t>();
      else if (key == "als_reg") cfg.als_reg = v.get<double>();
      else if (key == "als_sweeps") cfg.als_sweeps = v.get<std::size_t>();
      else if (key == "als_alpha") cfg.als_alpha = v.get<double>();
      else if (key == "user") cfg.user = v.get<std::string>();
      else if (key == "top_n") cfg.top_n = v.get<std::size_t>();
      else if (key == "exclude_seen") cfg.exclude_seen = v.get<bool>();
      else if (key == "grid") {
        if (!v.is_object()) throw_config("grid must be an object of arrays");
        for (const auto& [axis, values] : v.items()) {
          if (!values.is_array() || values.empty()) throw_config("grid axis '" + axis + "' must be a non-empty array");
          auto& out = cfg.grid_overrides.axes[axis];
          out.clear();
          for (const auto& x : values) out.push_back(param_from(x, axis));
        }
      } else {
        throw_config("unknown config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw_config("config key '" + key + "': " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_config("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void validate(const RunConfig& cfg) {
  if ((cfg.model == ModelName::Svc || cfg.model == ModelName::Gbt) && cfg.label_mode != LabelMode::Binary) {
    throw_config(std::string(to_string(cfg.model)) + " requires label_mode binary");
  }
  if (cfg.tuning != "cv" && cfg.tuning != "tvs") throw_config("tuning must be cv or tvs");
  if (cfg.folds < 2) throw_config("folds must be at least 2");
  if (!(cfg.train_ratio > 0.0 && cfg.train_ratio < 1.0)) throw_config("train_ratio must be in (0, 1)");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) throw_config("test_fraction must be in (0, 1)");
  if (!(cfg.max_malformed_fraction >= 0.0 && cfg.max_malformed_fraction <= 1.0)) {
    throw_config("max_malformed_fraction must be in [0, 1]");
  }
  if (cfg.sample_rows && *cfg.sample_rows == 0) throw_config("sample_rows must be positive");
  if (cfg.vocab_size == 0) throw_config("vocab_size must be positive");
  if (cfg.als_rank == 0) throw_config("als_rank must be positive");
  if (cfg.als_reg < 0.0) throw_config("als_reg must be nonnegative");
  if (cfg.top_n == 0) throw_config("top_n must be positive");
}

std::string config_to_json(const RunConfig& cfg) {
  json grid = json::object();
  for (const auto& [axis, values] : cfg.grid_overrides.axes) {
    json a = json::array();
    for (const auto& v : values) a.push_back(param_json(v));
    grid[axis] = std::move(a);
  }
  json j{{"ratings_path", cfg.ratings_path.string()},
         {"books_path", cfg.books_path.string()},
         {"out", cfg.out.string()},
         {"prepared", cfg.prepared_dir().string()},
         {"sample_rows", cfg.sample_rows ? json(*cfg.sample_rows) : json(nullptr)},
         {"max_malformed_fraction", cfg.max_malformed_fraction},
         {"label_mode", cfg.label_mode == LabelMode::Binary ? "binary" : "multiclass"},
         {"model", to_string(cfg.model)},
         {"tuning", cfg.tuning},
         {"folds", cfg.folds},
         {"train_ratio", cfg.train_ratio},
         {"test_fraction", cfg.test_fraction},
         {"metric", to_string(cfg.metric)},
         {"grid", grid},
         {"seed", cfg.seed},
         {"threads", cfg.threads},
         {"vocab_size", cfg.vocab_size},
         {"min_df", cfg.min_df},
         {"use_review_text", cfg.use_review_text},
         {"als_rank", cfg.als_rank},
         {"als_reg", cfg.als_reg},
         {"als_sweeps", cfg.als_sweeps},
         {"als_alpha", cfg.als_alpha},
         {"user", cfg.user},
         {"top_n", cfg.top_n},
         {"exclude_seen", cfg.exclude_seen}};
  return j.dump();
}

}  // namespace bookml::app
