#include <numeric>

#include "bookml/error.hpp"
#include "bookml/tree.hpp"

namespace bookml {
namespace {

void accumulate_tree(const DecisionTree& tree, std::vector<double>& acc) {
  if (tree.nodes.empty()) return;
  const double total = static_cast<double>(tree.nodes.front().n_samples);
  if (total <= 0.0) return;
  for (const auto& node : tree.nodes) {
    if (node.leaf) continue;
    acc.at(node.feature) += static_cast<double>(node.n_samples) / total * node.impurity_gain;
  }
}

Importances finish(std::vector<double> acc, const BlockMap& blocks) {
  Importances out;
  const double sum = std::accumulate(acc.begin(), acc.end(), 0.0);
  out.degenerate = !(sum > 0.0);
  if (!out.degenerate) {
    for (auto& v : acc) v /= sum;
  } else {
    std::fill(acc.begin(), acc.end(), 0.0);
  }
  out.per_block.assign(blocks.size(), 0.0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].offset + blocks[b].length > acc.size()) throw_data("block map exceeds model dimension");
    for (std::size_t f = blocks[b].offset; f < blocks[b].offset + blocks[b].length; ++f) {
      out.per_block[b] += acc[f];
    }
  }
  out.per_feature = std::move(acc);
  return out;
}

}  // namespace

Importances feature_importances(const DecisionTree& tree, const BlockMap& blocks) {
  std::vector<double> acc(tree.dimension, 0.0);
  accumulate_tree(tree, acc);
  return finish(std::move(acc), blocks);
}

Importances feature_importances(const ForestModel& forest, const BlockMap& blocks) {
  std::vector<double> acc(forest.trees.empty() ? 0 : forest.trees.front().dimension, 0.0);
  for (const auto& t : forest.trees) accumulate_tree(t, acc);
  return finish(std::move(acc), blocks);
}

Importances feature_importances(const GBTModel& model, const BlockMap& blocks) {
  std::vector<double> acc(model.dimension, 0.0);
  for (const auto& t : model.trees) accumulate_tree(t, acc);
  return finish(std::move(acc), blocks);
}

}  // namespace bookml
