#include "bookml/pipeline.hpp"

#include "bookml/error.hpp"
#include "bookml/parallel.hpp"

namespace bookml {
namespace {

const Column& require(const Table& t, const std::string& name, std::initializer_list<DType> allowed) {
  const auto idx = t.schema().find(name);
  if (!idx) throw_data("missing input column '" + name + "'");
  const auto& col = t.column(*idx);
  for (auto d : allowed) {
    if (col.dtype() == d) return col;
  }
  throw_data("input column '" + name + "' has unexpected dtype " + std::string(to_string(col.dtype())));
}

template <typename T, typename F>
std::vector<T> map_rows(std::size_t rows, F&& f) {
  std::vector<T> out(rows);
  // Fixed-size blocks keep the scheduling overhead low on small tables.
  constexpr std::size_t kBlock = 1024;
  parallel_for((rows + kBlock - 1) / kBlock, [&](std::size_t b) {
    const std::size_t end = std::min(rows, (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < end; ++r) out[r] = f(r);
  });
  return out;
}

std::vector<Tokens> token_input(const Table& t, const std::string& name) {
  const auto& col = require(t, name, {DType::Text, DType::Tokens});
  if (col.dtype() == DType::Tokens) return col.values<Tokens>();
  const auto& text = col.values<std::string>();
  return map_rows<Tokens>(t.row_count(), [&](std::size_t r) {
    return col.is_null(r) ? Tokens{} : tokenize(std::string_view(text[r]));
  });
}

Table apply(const fitted::Tokenizer& s, const Table& t) {
  const auto& col = require(t, s.spec.input, {DType::Text});
  const auto& text = col.values<std::string>();
  auto out = map_rows<Tokens>(t.row_count(), [&](std::size_t r) {
    return col.is_null(r) ? tokenize(std::nullopt) : tokenize(std::string_view(text[r]));
  });
  return t.with_column({s.spec.output, DType::Tokens, false}, Column(std::move(out)));
}

Table apply(const fitted::StopWordsRemover& s, const Table& t) {
  const auto& col = require(t, s.spec.input, {DType::Tokens});
  const StopList stop(s.spec.stopwords.begin(), s.spec.stopwords.end());
  const auto& toks = col.values<Tokens>();
  auto out = map_rows<Tokens>(t.row_count(), [&](std::size_t r) { return remove_stopwords(toks[r], stop); });
  return t.with_column({s.spec.output, DType::Tokens, false}, Column(std::move(out)));
}

Table apply(const fitted::CountVectorizer& s, const Table& t) {
  const auto& col = require(t, s.spec.input, {DType::Tokens});
  const auto& toks = col.values<Tokens>();
  auto out = map_rows<FeatureVector>(t.row_count(),
                                     [&](std::size_t r) { return transform_counts(s.vocabulary, toks[r]); });
  return t.with_column({s.spec.output, DType::Vector, false}, Column(std::move(out)));
}

Table apply(const fitted::Idf& s, const Table& t) {
  const auto& col = require(t, s.spec.input, {DType::Vector});
  const auto& vecs = col.values<FeatureVector>();
  auto out = map_rows<FeatureVector>(t.row_count(),
                                     [&](std::size_t r) { return transform_tfidf(vecs[r], s.weights); });
  return t.with_column({s.spec.output, DType::Vector, false}, Column(std::move(out)));
}

Table apply(const fitted::MinMaxScaler& s, const Table& t) {
  const auto& col = require(t, s.spec.input, {DType::Int64, DType::Float64});
  std::vector<double> out(t.row_count());
  std::vector<std::uint8_t> nulls(t.row_count(), 0);
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (col.is_null(r)) {
      nulls[r] = 1;
    } else {
      out[r] = transform_minmax(s.state, col.numeric(r));
    }
  }
  return t.with_column({s.spec.output, DType::Float64, true}, Column(std::move(out), std::move(nulls)));
}

Table apply(const fitted::VectorAssembler& s, const Table& t) {
  std::vector<const Column*> cols;
  for (const auto& name : s.spec.inputs) {
    cols.push_back(&require(t, name, {DType::Int64, DType::Float64, DType::Vector}));
  }
  auto out = map_rows<FeatureVector>(t.row_count(), [&](std::size_t r) {
    std::vector<FeaturePart> parts;
    parts.reserve(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& col = *cols[c];
      if (col.is_null(r)) {
        throw_data("assembler: null value in column '" + s.spec.inputs[c] + "' at row " + std::to_string(r));
      }
      if (col.dtype() == DType::Vector) {
        const auto& v = col.values<FeatureVector>()[r];
        if (v.dimension() != s.blocks[c].length) {
          throw_data("assembler: column '" + s.spec.inputs[c] + "' has dimension " +
                     std::to_string(v.dimension()) + ", fitted " + std::to_string(s.blocks[c].length));
        }
        parts.emplace_back(v);
      } else {
        parts.emplace_back(col.numeric(r));
      }
    }
    return assemble(parts);
  });
  return t.with_column({s.spec.output, DType::Vector, false}, Column(std::move(out)));
}

Table apply(const fitted::Labeler& s, const Table& t) {
  const auto& col = require(t, s.spec.input, {DType::Int64});
  const auto& scores = col.values<std::int64_t>();
  std::vector<std::int64_t> out(t.row_count());
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (col.is_null(r)) throw_data("labeler: null rating at row " + std::to_string(r));
    if (scores[r] < 1 || scores[r] > 5) throw_data("rating " + std::to_string(scores[r]) + " outside 1..5");
    out[r] = s.spec.mode == LabelMode::Binary ? binarize_label(scores[r]) : scores[r] - 1;
  }
  return t.with_column({s.spec.output, DType::Int64, false}, Column(std::move(out)));
}

FittedStage fit(const stage::Tokenizer& s, const Table&) { return fitted::Tokenizer{s}; }
FittedStage fit(const stage::StopWordsRemover& s, const Table&) { return fitted::StopWordsRemover{s}; }

FittedStage fit(const stage::CountVectorizer& s, const Table& t) {
  const auto docs = token_input(t, s.input);
  return fitted::CountVectorizer{s, fit_count_vectorizer(docs, s.vocab_size, s.min_df)};
}

FittedStage fit(const stage::Idf& s, const Table& t) {
  const auto& col = require(t, s.input, {DType::Vector});
  const auto& vecs = col.values<FeatureVector>();
  if (vecs.empty()) throw_data("idf: empty table");
  const std::size_t dim = vecs.front().dimension();
  std::vector<std::size_t> df(dim, 0);
  for (const auto& v : vecs) {
    if (v.dimension() != dim) throw_data("idf: vector dimension varies between rows");
    v.for_each_nonzero([&](std::size_t i, double) { ++df[i]; });
  }
  auto w = idf_weights(df, vecs.size());
  return fitted::Idf{s, std::move(df), vecs.size(), std::move(w)};
}

FittedStage fit(const stage::MinMaxScaler& s, const Table& t) {
  require(t, s.input, {DType::Int64, DType::Float64});
  return fitted::MinMaxScaler{s, fit_minmax(t, s.input)};
}

FittedStage fit(const stage::VectorAssembler& s, const Table& t) {
  if (s.inputs.empty()) throw_config("assembler needs at least one input");
  BlockMap blocks;
  std::size_t offset = 0;
  for (const auto& name : s.inputs) {
    const auto& col = require(t, name, {DType::Int64, DType::Float64, DType::Vector});
    std::size_t len = 1;
    if (col.dtype() == DType::Vector) {
      const auto& vecs = col.values<FeatureVector>();
      if (vecs.empty()) throw_data("assembler: cannot infer dimension from an empty table");
      len = vecs.front().dimension();
    }
    blocks.push_back(Block{name, offset, len});
    offset += len;
  }
  return fitted::VectorAssembler{s, std::move(blocks)};
}

FittedStage fit(const stage::Labeler& s, const Table&) { return fitted::Labeler{s}; }

Table apply_stage(const FittedStage& s, const Table& t) {
  return std::visit([&](const auto& stage) { return apply(stage, t); }, s);
}

// Spec and fitted variants list the stage kinds in the same order.
std::string_view kind_name(std::size_t index) {
  constexpr std::string_view names[] = {"tokenizer", "stopwords", "count_vectorizer", "idf",
                                        "minmax",    "assembler", "labeler"};
  return names[index];
}

[[noreturn]] void rethrow_with_stage(std::size_t i, std::string_view kind, const Error& e) {
  throw Error(e.kind(), "pipeline stage " + std::to_string(i) + " (" + std::string(kind) + "): " + e.what());
}

}  // namespace

std::string_view stage_kind(const FittedStage& s) { return kind_name(s.index()); }

Table PipelineModel::transform(const Table& input) const {
  Table t = input;
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    try {
      t = apply_stage(stages_[i], t);
    } catch (const Error& e) {
      rethrow_with_stage(i, stage_kind(stages_[i]), e);
    }
  }
  return t;
}

std::optional<BlockMap> PipelineModel::block_map() const {
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    if (const auto* a = std::get_if<fitted::VectorAssembler>(&*it)) return a->blocks;
  }
  return std::nullopt;
}

std::pair<PipelineModel, Table> pipeline_fit_transform(std::span<const StageSpec> stages, const Table& train) {
  std::vector<FittedStage> fitted_stages;
  Table t = train;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    FittedStage f;
    try {
      f = std::visit([&](const auto& spec) { return fit(spec, t); }, stages[i]);
      t = apply_stage(f, t);
    } catch (const Error& e) {
      rethrow_with_stage(i, kind_name(stages[i].index()), e);
    }
    fitted_stages.push_back(std::move(f));
  }
  return {PipelineModel(std::move(fitted_stages)), std::move(t)};
}

}  // namespace bookml
