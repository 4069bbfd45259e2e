#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bookml/features.hpp"
#include "bookml/table.hpp"

namespace bookml {

enum class LabelMode { Multiclass, Binary };

// Stage specifications. Each stage reads named columns and appends one new
// output column.
namespace stage {

struct Tokenizer {
  std::string input;
  std::string output;
};

struct StopWordsRemover {
  std::string input;
  std::string output;
  std::vector<std::string> stopwords = default_stopwords();
};

struct CountVectorizer {
  std::string input;
  std::string output;
  std::size_t vocab_size = 4096;
  std::size_t min_df = 2;
};

struct Idf {
  std::string input;
  std::string output;
};

struct MinMaxScaler {
  std::string input;
  std::string output;
};

struct VectorAssembler {
  std::vector<std::string> inputs;
  std::string output;
};

// Multiclass maps rating r to class r - 1; binary applies binarize_label.
struct Labeler {
  std::string input;
  std::string output;
  LabelMode mode = LabelMode::Multiclass;
};

}  // namespace stage

using StageSpec = std::variant<stage::Tokenizer, stage::StopWordsRemover, stage::CountVectorizer,
                               stage::Idf, stage::MinMaxScaler, stage::VectorAssembler, stage::Labeler>;

// Fitted forms. Stateless stages carry only their spec.
namespace fitted {

struct Tokenizer {
  stage::Tokenizer spec;
};
struct StopWordsRemover {
  stage::StopWordsRemover spec;
};
struct CountVectorizer {
  stage::CountVectorizer spec;
  Vocabulary vocabulary;
};
struct Idf {
  stage::Idf spec;
  std::vector<std::size_t> doc_freq;
  std::size_t corpus_size = 0;
  std::vector<double> weights;
};
struct MinMaxScaler {
  stage::MinMaxScaler spec;
  MinMaxState state;
};
struct VectorAssembler {
  stage::VectorAssembler spec;
  BlockMap blocks;
};
struct Labeler {
  stage::Labeler spec;
};

}  // namespace fitted

using FittedStage = std::variant<fitted::Tokenizer, fitted::StopWordsRemover, fitted::CountVectorizer,
                                 fitted::Idf, fitted::MinMaxScaler, fitted::VectorAssembler,
                                 fitted::Labeler>;

std::string_view stage_kind(const FittedStage& s);

class PipelineModel {
 public:
  PipelineModel() = default;
  explicit PipelineModel(std::vector<FittedStage> stages) : stages_(std::move(stages)) {}

  // Pure: equal inputs give equal outputs. Row count is preserved.
  Table transform(const Table& input) const;

  const std::vector<FittedStage>& stages() const noexcept { return stages_; }
  // Block map of the last assembler stage, if any.
  std::optional<BlockMap> block_map() const;

 private:
  std::vector<FittedStage> stages_;
};

// Fits each stage on the train table as transformed by the stages before it.
// Failures are rethrown with the stage index prefixed to the message.
std::pair<PipelineModel, Table> pipeline_fit_transform(std::span<const StageSpec> stages,
                                                       const Table& train);

}  // namespace bookml
