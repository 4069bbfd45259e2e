#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bookml {

struct MetricsReport {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  // confusion[truth][prediction]
  std::vector<std::vector<std::uint64_t>> confusion;
  std::vector<double> precision;  // per class
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::uint64_t> support;
};

// Per-class precision, recall and F1 are 0 when their denominator is 0.
// Weighted metrics average per-class values by each class's share of truth.
MetricsReport evaluate_multiclass(std::span<const int> preds, std::span<const int> truth, int num_classes);
MetricsReport evaluate_binary(std::span<const int> preds, std::span<const int> truth);

struct RegressionMetrics {
  double rmse = 0.0;
  // Absent when the truth has zero variance.
  std::optional<double> r2;
};

RegressionMetrics evaluate_regression(std::span<const double> preds, std::span<const double> truth);

}  // namespace bookml
