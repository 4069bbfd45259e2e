#pragma once

// Histogram-based tree growing shared by the decision tree, the random forest
// and the boosted trees.

#include <cstdint>
#include <span>
#include <vector>

#include "bookml/rng.hpp"
#include "bookml/tree.hpp"

namespace bookml::detail {

// Sorted distinct values with their multiplicities -> split thresholds.
std::vector<double> thresholds_from_distinct(std::span<const double> values,
                                             std::span<const std::size_t> counts, std::size_t max_bins);

// Row-major sparse matrix of bin indices. A value v of feature f falls in bin
// #{t in thresholds(f) : t < v}, so split j sends a row left iff bin <= j.
class BinnedMatrix {
 public:
  BinnedMatrix(std::span<const FeatureVector> X, std::size_t max_bins);

  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t dimension() const noexcept { return thresholds_.size(); }
  const std::vector<double>& thresholds(std::size_t f) const { return thresholds_[f]; }
  std::size_t bins(std::size_t f) const { return thresholds_[f].size() + 1; }
  std::size_t bin_offset(std::size_t f) const { return offsets_[f]; }
  std::size_t total_bins() const noexcept { return offsets_.back(); }
  std::uint16_t zero_bin(std::size_t f) const { return zero_bin_[f]; }

  std::span<const std::uint32_t> row_features(std::size_t r) const {
    return {features_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const std::uint16_t> row_bins(std::size_t r) const {
    return {bins_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::uint16_t bin_of(std::size_t r, std::size_t f) const;

 private:
  std::vector<std::vector<double>> thresholds_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint16_t> zero_bin_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> features_;
  std::vector<std::uint16_t> bins_;
};

// Classification when num_classes > 0 (labels y); regression otherwise, with
// targets g and Newton denominators h (leaf = sum(w g) / sum(w h)).
struct Target {
  int num_classes = 0;
  std::span<const int> y;
  std::span<const double> g;
  std::span<const double> h;
};

struct GrowParams {
  std::size_t max_depth = 5;
  std::size_t min_instances_per_node = 1;
  // 0 or >= dimension means every feature at every node.
  std::size_t feature_subset_size = 0;
  Rng* rng = nullptr;
};

// weights[r] is the multiplicity of row r (0 excludes it).
DecisionTree grow_tree(const BinnedMatrix& data, const Target& target, std::span<const std::uint32_t> weights,
                       const GrowParams& params);

// Best split of the rows with nonzero weight; nullopt when no split has gain.
std::optional<Split> find_split(const BinnedMatrix& data, const Target& target,
                                std::span<const std::uint32_t> rows, std::span<const std::uint32_t> weights,
                                std::span<const std::size_t> features, std::size_t min_instances);

}  // namespace bookml::detail
