#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bookml {

// Real-valued vector in either dense or sparse form.
//
// Sparse form keeps strictly increasing indices below the dimension and never
// stores an explicit zero. Equality compares the represented vectors as well
// as the storage form, so a dense and a sparse vector are never equal.
class FeatureVector {
 public:
  FeatureVector() = default;

  static FeatureVector dense(std::vector<double> values);
  // Validates ordering and bounds; zero values are dropped.
  static FeatureVector sparse(std::size_t dimension, std::vector<std::uint32_t> indices,
                              std::vector<double> values);
  static FeatureVector zeros(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  bool is_sparse() const noexcept { return sparse_; }
  // Stored entries: dimension() for dense vectors, non-zero count for sparse.
  std::size_t stored() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const;

  std::span<const std::uint32_t> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }

  template <typename F>
  void for_each_nonzero(F&& f) const {
    if (sparse_) {
      for (std::size_t k = 0; k < values_.size(); ++k) f(std::size_t{indices_[k]}, values_[k]);
    } else {
      for (std::size_t k = 0; k < values_.size(); ++k) {
        if (values_[k] != 0.0) f(k, values_[k]);
      }
    }
  }

  double dot(std::span<const double> weights) const;
  std::vector<double> to_dense() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::size_t dimension_ = 0;
  bool sparse_ = true;
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
};

}  // namespace bookml
