#include "bookml/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bookml/error.hpp"
#include "bookml/parallel.hpp"

namespace bookml {
namespace {

// Row chunk size for the loss reduction. Fixed so the summation order never
// depends on the worker count.
constexpr std::size_t kChunk = 2048;

void check_inputs(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                  std::size_t dimension) {
  if (X.empty()) throw_data("empty training data");
  if (X.size() != y.size()) throw_data("features/labels length mismatch");
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].dimension() != dimension) {
      throw_data("row " + std::to_string(i) + " has dimension " + std::to_string(X[i].dimension()) +
                 ", expected " + std::to_string(dimension));
    }
    if (y[i] < 0 || y[i] >= num_classes) throw_data("label " + std::to_string(y[i]) + " out of range");
  }
}

std::size_t distinct_labels(std::span<const int> y, int num_classes) {
  std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
  for (int v : y) seen[static_cast<std::size_t>(v)] = true;
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

void scores(const LinearModel& m, const FeatureVector& x, std::vector<double>& out) {
  out.resize(m.rows());
  for (std::size_t k = 0; k < m.rows(); ++k) out[k] = x.dot(m.row(k)) + m.intercepts[k];
}

double squared_norm(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

}  // namespace

LinearModel LinearModel::zeros(LinearKind kind, int num_classes, std::size_t dimension) {
  LinearModel m;
  m.kind = kind;
  m.num_classes = num_classes;
  m.dimension = dimension;
  const std::size_t rows = kind == LinearKind::Logistic ? static_cast<std::size_t>(num_classes) : 1;
  m.weights.assign(rows * dimension, 0.0);
  m.intercepts.assign(rows, 0.0);
  return m;
}

Objective logistic_objective(const LinearModel& model, std::span<const FeatureVector> X,
                             std::span<const int> y, double l2_reg) {
  if (model.kind != LinearKind::Logistic) throw_config("logistic_objective needs a logistic model");
  check_inputs(X, y, model.num_classes, model.dimension);

  const std::size_t K = model.rows();
  const std::size_t d = model.dimension;
  const std::size_t chunks = (X.size() + kChunk - 1) / kChunk;
  std::vector<Objective> partial(chunks);

  parallel_for(chunks, [&](std::size_t c) {
    Objective& p = partial[c];
    p.grad_weights.assign(K * d, 0.0);
    p.grad_intercepts.assign(K, 0.0);
    std::vector<double> s;
    const std::size_t end = std::min(X.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      scores(model, X[i], s);
      const double mx = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (auto& v : s) {
        v = std::exp(v - mx);
        z += v;
      }
      const auto yi = static_cast<std::size_t>(y[i]);
      p.loss += std::log(z) - std::log(s[yi]);
      for (std::size_t k = 0; k < K; ++k) {
        const double r = s[k] / z - (k == yi ? 1.0 : 0.0);
        if (r == 0.0) continue;
        p.grad_intercepts[k] += r;
        double* g = p.grad_weights.data() + k * d;
        X[i].for_each_nonzero([&](std::size_t j, double v) { g[j] += r * v; });
      }
    }
  });

  Objective out;
  out.grad_weights.assign(K * d, 0.0);
  out.grad_intercepts.assign(K, 0.0);
  for (const auto& p : partial) {
    out.loss += p.loss;
    for (std::size_t j = 0; j < out.grad_weights.size(); ++j) out.grad_weights[j] += p.grad_weights[j];
    for (std::size_t k = 0; k < K; ++k) out.grad_intercepts[k] += p.grad_intercepts[k];
  }
  const double n = static_cast<double>(X.size());
  out.loss /= n;
  for (auto& g : out.grad_intercepts) g /= n;
  for (std::size_t j = 0; j < out.grad_weights.size(); ++j) {
    out.grad_weights[j] = out.grad_weights[j] / n + l2_reg * model.weights[j];
  }
  out.loss += 0.5 * l2_reg * squared_norm(model.weights);
  return out;
}

LinearModel train_logistic(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                           const TrainConfig& cfg) {
  if (X.empty()) throw_data("logistic regression: empty data");
  if (num_classes < 2) throw_config("logistic regression needs at least 2 classes");
  if (!(cfg.step_size > 0.0) || cfg.l2_reg < 0.0) throw_config("invalid logistic training config");
  check_inputs(X, y, num_classes, X.front().dimension());
  if (distinct_labels(y, num_classes) < 2) throw_data("logistic regression: only one class present");

  LinearModel model = LinearModel::zeros(LinearKind::Logistic, num_classes, X.front().dimension());
  Objective cur = logistic_objective(model, X, y, cfg.l2_reg);
  if (!std::isfinite(cur.loss)) throw_numeric("logistic regression: non-finite initial loss");
  model.objective_trace.push_back(cur.loss);

  double step = cfg.step_size;
  std::size_t accepted = 0;
  LinearModel trial = model;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const double gnorm2 = squared_norm(cur.grad_weights) + squared_norm(cur.grad_intercepts);
    if (std::sqrt(gnorm2) < cfg.tol) break;

    bool ok = false;
    bool saw_finite = false;
    Objective next;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      for (std::size_t j = 0; j < model.weights.size(); ++j) {
        trial.weights[j] = model.weights[j] - step * cur.grad_weights[j];
      }
      for (std::size_t k = 0; k < model.intercepts.size(); ++k) {
        trial.intercepts[k] = model.intercepts[k] - step * cur.grad_intercepts[k];
      }
      next = logistic_objective(trial, X, y, cfg.l2_reg);
      if (!std::isfinite(next.loss)) continue;
      saw_finite = true;
      if (next.loss <= cur.loss - 1e-4 * step * gnorm2) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      if (!saw_finite) throw_numeric("logistic regression: non-finite loss at every step size");
      break;  // no further decrease representable
    }
    std::swap(model.weights, trial.weights);
    std::swap(model.intercepts, trial.intercepts);
    trial.weights = model.weights;
    trial.intercepts = model.intercepts;
    cur = std::move(next);
    model.objective_trace.push_back(cur.loss);
    ++accepted;
    step = std::min(step * 2.0, 1e6);
  }
  model.iterations = accepted;
  model.final_objective = cur.loss;
  return model;
}

LogisticPrediction predict_logistic(const LinearModel& model, const FeatureVector& x) {
  if (model.kind != LinearKind::Logistic) throw_config("predict_logistic needs a logistic model");
  if (x.dimension() != model.dimension) throw_data("predict: dimension mismatch");
  LogisticPrediction p;
  scores(model, x, p.probabilities);
  const double mx = *std::max_element(p.probabilities.begin(), p.probabilities.end());
  double z = 0.0;
  for (auto& v : p.probabilities) {
    v = std::exp(v - mx);
    z += v;
  }
  for (auto& v : p.probabilities) v /= z;
  p.label = static_cast<int>(std::max_element(p.probabilities.begin(), p.probabilities.end()) -
                             p.probabilities.begin());
  return p;
}

double svc_objective(const LinearModel& model, std::span<const FeatureVector> X, std::span<const int> y,
                     double l2_reg) {
  if (model.kind != LinearKind::Svc) throw_config("svc_objective needs an svc model");
  check_inputs(X, y, 2, model.dimension);
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double sign = y[i] == 1 ? 1.0 : -1.0;
    const double margin = X[i].dot(model.row(0)) + model.intercepts[0];
    loss += std::max(0.0, 1.0 - sign * margin);
  }
  return loss / static_cast<double>(X.size()) + 0.5 * l2_reg * squared_norm(model.weights);
}

LinearModel train_linear_svc(std::span<const FeatureVector> X, std::span<const int> y,
                             const TrainConfig& cfg) {
  if (X.empty()) throw_data("linear svc: empty data");
  if (!(cfg.step_size > 0.0) || cfg.l2_reg < 0.0) throw_config("invalid svc training config");
  check_inputs(X, y, 2, X.front().dimension());
  if (distinct_labels(y, 2) < 2) throw_data("linear svc: both classes must be present");

  const std::size_t d = X.front().dimension();
  const double n = static_cast<double>(X.size());
  LinearModel cur = LinearModel::zeros(LinearKind::Svc, 2, d);
  LinearModel best = cur;
  best.final_objective = svc_objective(cur, X, y, cfg.l2_reg);
  cur.objective_trace.push_back(best.final_objective);

  std::vector<double> gw(d);
  std::size_t best_iter = 0;
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double sign = y[i] == 1 ? 1.0 : -1.0;
      const double margin = X[i].dot(cur.row(0)) + cur.intercepts[0];
      if (sign * margin < 1.0) {
        X[i].for_each_nonzero([&](std::size_t j, double v) { gw[j] -= sign * v; });
        gb -= sign;
      }
    }
    for (std::size_t j = 0; j < d; ++j) gw[j] = gw[j] / n + cfg.l2_reg * cur.weights[j];
    gb /= n;
    if (std::sqrt(squared_norm(gw) + gb * gb) < cfg.tol) break;

    const double eta = cfg.step_size / std::sqrt(static_cast<double>(t));
    for (std::size_t j = 0; j < d; ++j) cur.weights[j] -= eta * gw[j];
    cur.intercepts[0] -= eta * gb;

    const double obj = svc_objective(cur, X, y, cfg.l2_reg);
    if (!std::isfinite(obj)) throw_numeric("linear svc: non-finite objective");
    cur.objective_trace.push_back(obj);
    if (obj < best.final_objective) {
      best.weights = cur.weights;
      best.intercepts = cur.intercepts;
      best.final_objective = obj;
      best_iter = t;
    }
  }
  best.iterations = best_iter;
  best.objective_trace = std::move(cur.objective_trace);
  return best;
}

SvcPrediction predict_svc(const LinearModel& model, const FeatureVector& x) {
  if (model.kind != LinearKind::Svc) throw_config("predict_svc needs an svc model");
  if (x.dimension() != model.dimension) throw_data("predict: dimension mismatch");
  SvcPrediction p;
  p.margin = x.dot(model.row(0)) + model.intercepts[0];
  p.label = p.margin > 0.0 ? 1 : 0;
  return p;
}

}  // namespace bookml
