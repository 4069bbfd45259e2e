#include "bookml/feature_vector.hpp"

#include <algorithm>
#include <string>

#include "bookml/error.hpp"

namespace bookml {

FeatureVector FeatureVector::dense(std::vector<double> values) {
  FeatureVector v;
  v.dimension_ = values.size();
  v.sparse_ = false;
  v.values_ = std::move(values);
  return v;
}

FeatureVector FeatureVector::sparse(std::size_t dimension, std::vector<std::uint32_t> indices,
                                    std::vector<double> values) {
  if (indices.size() != values.size()) {
    throw_data("sparse vector: index/value length mismatch");
  }
  FeatureVector v;
  v.dimension_ = dimension;
  v.sparse_ = true;
  v.indices_.reserve(indices.size());
  v.values_.reserve(values.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= dimension) {
      throw_data("sparse vector: index " + std::to_string(indices[k]) + " >= dimension " +
                 std::to_string(dimension));
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw_data("sparse vector: indices must be strictly increasing");
    }
    if (values[k] == 0.0) continue;
    v.indices_.push_back(indices[k]);
    v.values_.push_back(values[k]);
  }
  return v;
}

FeatureVector FeatureVector::zeros(std::size_t dimension) {
  FeatureVector v;
  v.dimension_ = dimension;
  return v;
}

double FeatureVector::operator[](std::size_t i) const {
  if (i >= dimension_) throw_data("feature index out of range");
  if (!sparse_) return values_[i];
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
  if (it == indices_.end() || *it != i) return 0.0;
  return values_[static_cast<std::size_t>(it - indices_.begin())];
}

double FeatureVector::dot(std::span<const double> weights) const {
  if (weights.size() != dimension_) throw_data("dot: dimension mismatch");
  double acc = 0.0;
  if (sparse_) {
    for (std::size_t k = 0; k < values_.size(); ++k) acc += values_[k] * weights[indices_[k]];
  } else {
    for (std::size_t k = 0; k < values_.size(); ++k) acc += values_[k] * weights[k];
  }
  return acc;
}

std::vector<double> FeatureVector::to_dense() const {
  if (!sparse_) return values_;
  std::vector<double> out(dimension_, 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) out[indices_[k]] = values_[k];
  return out;
}

}  // namespace bookml
