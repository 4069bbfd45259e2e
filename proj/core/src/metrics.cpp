#include "bookml/metrics.hpp"

#include <cmath>
#include <string>

#include "bookml/error.hpp"

namespace bookml {

MetricsReport evaluate_multiclass(std::span<const int> preds, std::span<const int> truth, int num_classes) {
  if (preds.size() != truth.size()) throw_data("metrics: predictions and truth differ in length");
  if (preds.empty()) throw_data("metrics: empty input");
  if (num_classes < 1) throw_config("metrics: num_classes must be positive");
  const auto K = static_cast<std::size_t>(num_classes);

  MetricsReport m;
  m.confusion.assign(K, std::vector<std::uint64_t>(K, 0));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || preds[i] >= num_classes || truth[i] < 0 || truth[i] >= num_classes) {
      throw_data("metrics: label out of range at position " + std::to_string(i));
    }
    ++m.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(preds[i])];
  }

  const double total = static_cast<double>(preds.size());
  std::uint64_t correct = 0;
  m.precision.assign(K, 0.0);
  m.recall.assign(K, 0.0);
  m.f1.assign(K, 0.0);
  m.support.assign(K, 0);
  for (std::size_t c = 0; c < K; ++c) {
    std::uint64_t predicted = 0;
    for (std::size_t t = 0; t < K; ++t) {
      m.support[c] += m.confusion[c][t];
      predicted += m.confusion[t][c];
    }
    const auto tp = m.confusion[c][c];
    correct += tp;
    m.precision[c] = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall[c] = m.support[c] ? static_cast<double>(tp) / static_cast<double>(m.support[c]) : 0.0;
    const double pr = m.precision[c] + m.recall[c];
    m.f1[c] = pr > 0.0 ? 2.0 * m.precision[c] * m.recall[c] / pr : 0.0;

    const double share = static_cast<double>(m.support[c]) / total;
    m.weighted_precision += share * m.precision[c];
    m.weighted_recall += share * m.recall[c];
    m.weighted_f1 += share * m.f1[c];
  }
  m.accuracy = static_cast<double>(correct) / total;
  return m;
}

MetricsReport evaluate_binary(std::span<const int> preds, std::span<const int> truth) {
  return evaluate_multiclass(preds, truth, 2);
}

RegressionMetrics evaluate_regression(std::span<const double> preds, std::span<const double> truth) {
  if (preds.size() != truth.size()) throw_data("metrics: predictions and truth differ in length");
  if (truth.size() < 2) throw_data("regression metrics need at least 2 points");
  const double n = static_cast<double>(truth.size());
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= n;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (preds[i] - truth[i]) * (preds[i] - truth[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  RegressionMetrics r;
  r.rmse = std::sqrt(ss_res / n);
  if (ss_tot > 0.0) r.r2 = 1.0 - ss_res / ss_tot;
  return r;
}

}  // namespace bookml
