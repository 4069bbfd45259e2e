#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

#include "bookml/error.hpp"
#include "tree_builder.hpp"

namespace bookml {
namespace detail {
namespace {

constexpr double kMinGain = 1e-12;

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

// Per-bin statistics: class counts for classification, (w, sum w*g, sum w*g^2)
// for regression.
struct StatOps {
  const Target& target;
  std::size_t width;

  explicit StatOps(const Target& t)
      : target(t), width(t.num_classes > 0 ? static_cast<std::size_t>(t.num_classes) : 3) {}

  void add(double* s, std::size_t r, double w) const {
    if (target.num_classes > 0) {
      s[target.y[r]] += w;
    } else {
      const double g = target.g[r];
      s[0] += w;
      s[1] += w * g;
      s[2] += w * g * g;
    }
  }

  double count(const double* s) const {
    if (target.num_classes > 0) return std::accumulate(s, s + width, 0.0);
    return s[0];
  }

  double impurity(const double* s) const {
    if (target.num_classes > 0) return gini(std::span<const double>(s, width));
    if (s[0] <= 0.0) return 0.0;
    const double mean = s[1] / s[0];
    return std::max(0.0, s[2] / s[0] - mean * mean);
  }
};

struct SplitAt {
  Split split;
  std::size_t bin = 0;
};

std::optional<SplitAt> search(const BinnedMatrix& data, const StatOps& ops, std::span<const std::uint32_t> rows,
                              std::span<const std::uint32_t> weights, std::span<const std::size_t> features,
                              std::size_t min_instances, bool allow_zero_gain = false) {
  const std::size_t S = ops.width;
  std::vector<double> total(S, 0.0);
  for (auto r : rows) ops.add(total.data(), r, weights[r]);
  const double n = ops.count(total.data());
  if (n < 2.0) return std::nullopt;
  const double parent = ops.impurity(total.data());
  if (parent <= 0.0) return std::nullopt;

  std::vector<char> in_subset(data.dimension(), 0);
  for (auto f : features) in_subset[f] = 1;

  std::vector<double> hist(data.total_bins() * S, 0.0);
  std::vector<char> touched_mark(data.dimension(), 0);
  std::vector<std::size_t> touched;
  for (auto r : rows) {
    const double w = weights[r];
    const auto fs = data.row_features(r);
    const auto bs = data.row_bins(r);
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto f = fs[k];
      if (!in_subset[f]) continue;
      ops.add(&hist[(data.bin_offset(f) + bs[k]) * S], r, w);
      if (!touched_mark[f]) {
        touched_mark[f] = 1;
        touched.push_back(f);
      }
    }
  }
  std::sort(touched.begin(), touched.end());

  std::optional<SplitAt> best;
  std::optional<SplitAt> zero_gain;
  double best_gain = kMinGain;
  std::vector<double> nz(S), left(S), right(S);
  for (auto f : touched) {
    const std::size_t base = data.bin_offset(f);
    const std::size_t B = data.bins(f);
    if (B < 2) continue;
    std::fill(nz.begin(), nz.end(), 0.0);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t s = 0; s < S; ++s) nz[s] += hist[(base + b) * S + s];
    }
    // Rows absent from the sparse entries hold 0 for this feature.
    double* zb = &hist[(base + data.zero_bin(f)) * S];
    for (std::size_t s = 0; s < S; ++s) zb[s] += total[s] - nz[s];

    std::fill(left.begin(), left.end(), 0.0);
    for (std::size_t j = 0; j + 1 < B; ++j) {
      for (std::size_t s = 0; s < S; ++s) {
        left[s] += hist[(base + j) * S + s];
        right[s] = total[s] - left[s];
      }
      const double nl = ops.count(left.data());
      const double nr = n - nl;
      if (nl < static_cast<double>(min_instances) || nr < static_cast<double>(min_instances) || nl <= 0.0 ||
          nr <= 0.0) {
        continue;
      }
      const double gain = parent - (nl / n) * ops.impurity(left.data()) - (nr / n) * ops.impurity(right.data());
      if (gain > best_gain) {
        best_gain = gain;
        best = SplitAt{Split{f, data.thresholds(f)[j], gain}, j};
      } else if (allow_zero_gain && !zero_gain && gain > -kMinGain) {
        zero_gain = SplitAt{Split{f, data.thresholds(f)[j], 0.0}, j};
      }
    }
  }
  return best ? best : zero_gain;
}

}  // namespace

std::vector<double> thresholds_from_distinct(std::span<const double> values, std::span<const std::size_t> counts,
                                             std::size_t max_bins) {
  std::vector<double> out;
  const std::size_t D = values.size();
  if (D <= 1) return out;
  if (D <= max_bins) {
    for (std::size_t i = 0; i + 1 < D; ++i) out.push_back(midpoint(values[i], values[i + 1]));
    return out;
  }
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  std::vector<double> cum(D);
  double acc = 0.0;
  for (std::size_t i = 0; i < D; ++i) cum[i] = acc += static_cast<double>(counts[i]);
  for (std::size_t q = 1; q < max_bins; ++q) {
    const double target = static_cast<double>(q) * n / static_cast<double>(max_bins);
    const auto j = static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
    if (j + 1 >= D) break;
    const double t = midpoint(values[j], values[j + 1]);
    if (out.empty() || out.back() < t) out.push_back(t);
  }
  return out;
}

BinnedMatrix::BinnedMatrix(std::span<const FeatureVector> X, std::size_t max_bins) {
  if (X.empty()) throw_data("tree: empty training data");
  if (max_bins < 2 || max_bins > 65535) throw_config("max_bins must lie in [2, 65535]");
  const std::size_t d = X.front().dimension();
  std::vector<std::vector<double>> column(d);
  for (std::size_t r = 0; r < X.size(); ++r) {
    if (X[r].dimension() != d) throw_data("tree: row " + std::to_string(r) + " has a different dimension");
    X[r].for_each_nonzero([&](std::size_t f, double v) { column[f].push_back(v); });
  }

  thresholds_.resize(d);
  zero_bin_.resize(d);
  offsets_.assign(d + 1, 0);
  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (std::size_t f = 0; f < d; ++f) {
    auto& vals = column[f];
    const std::size_t zeros = X.size() - vals.size();
    if (zeros > 0) vals.insert(vals.end(), 1, 0.0);
    std::sort(vals.begin(), vals.end());
    distinct.clear();
    counts.clear();
    for (double v : vals) {
      if (!distinct.empty() && distinct.back() == v) {
        ++counts.back();
      } else {
        distinct.push_back(v);
        counts.push_back(1);
      }
    }
    if (zeros > 0) {
      const auto z = std::lower_bound(distinct.begin(), distinct.end(), 0.0) - distinct.begin();
      counts[static_cast<std::size_t>(z)] += zeros - 1;
    }
    thresholds_[f] = thresholds_from_distinct(distinct, counts, max_bins);
    zero_bin_[f] = static_cast<std::uint16_t>(
        std::lower_bound(thresholds_[f].begin(), thresholds_[f].end(), 0.0) - thresholds_[f].begin());
    offsets_[f + 1] = offsets_[f] + thresholds_[f].size() + 1;
    std::vector<double>().swap(vals);
  }

  row_ptr_.assign(1, 0);
  for (const auto& x : X) {
    x.for_each_nonzero([&](std::size_t f, double v) {
      const auto& t = thresholds_[f];
      features_.push_back(static_cast<std::uint32_t>(f));
      bins_.push_back(static_cast<std::uint16_t>(std::lower_bound(t.begin(), t.end(), v) - t.begin()));
    });
    row_ptr_.push_back(features_.size());
  }
}

std::uint16_t BinnedMatrix::bin_of(std::size_t r, std::size_t f) const {
  const auto fs = row_features(r);
  const auto it = std::lower_bound(fs.begin(), fs.end(), static_cast<std::uint32_t>(f));
  if (it == fs.end() || *it != f) return zero_bin_[f];
  return row_bins(r)[static_cast<std::size_t>(it - fs.begin())];
}

std::optional<Split> find_split(const BinnedMatrix& data, const Target& target, std::span<const std::uint32_t> rows,
                                std::span<const std::uint32_t> weights, std::span<const std::size_t> features,
                                std::size_t min_instances) {
  const StatOps ops(target);
  if (auto s = search(data, ops, rows, weights, features, min_instances)) return s->split;
  return std::nullopt;
}

DecisionTree grow_tree(const BinnedMatrix& data, const Target& target, std::span<const std::uint32_t> weights,
                       const GrowParams& params) {
  const StatOps ops(target);
  const std::size_t d = data.dimension();
  DecisionTree tree;
  tree.num_classes = target.num_classes;
  tree.dimension = d;

  std::vector<std::size_t> all_features(d);
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});
  const bool subsample = params.feature_subset_size > 0 && params.feature_subset_size < d;
  std::vector<std::size_t> pool = all_features;

  std::vector<std::uint32_t> root_rows;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (weights[r] > 0) root_rows.push_back(static_cast<std::uint32_t>(r));
  }
  if (root_rows.empty()) throw_data("tree: no rows with positive weight");

  std::function<std::int32_t(std::vector<std::uint32_t>&, std::size_t)> build =
      [&](std::vector<std::uint32_t>& rows, std::size_t depth) -> std::int32_t {
    const auto idx = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::vector<double> total(ops.width, 0.0);
    double hsum = 0.0;
    for (auto r : rows) {
      ops.add(total.data(), r, weights[r]);
      if (target.num_classes == 0) hsum += weights[r] * target.h[r];
    }
    const double n = ops.count(total.data());
    {
      TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
      node.n_samples = static_cast<std::uint64_t>(n + 0.5);
      if (target.num_classes > 0) {
        node.distribution.resize(ops.width);
        for (std::size_t k = 0; k < ops.width; ++k) node.distribution[k] = total[k] / n;
      } else {
        node.value = hsum > 1e-300 ? total[1] / hsum : 0.0;
      }
    }

    if (depth >= params.max_depth || n < 2.0 * static_cast<double>(params.min_instances_per_node) ||
        ops.impurity(total.data()) <= 0.0) {
      return idx;
    }

    std::span<const std::size_t> features = all_features;
    std::vector<std::size_t> chosen;
    if (subsample) {
      for (std::size_t i = 0; i < params.feature_subset_size; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(*params.rng, d - i));
        std::swap(pool[i], pool[j]);
      }
      chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(params.feature_subset_size));
      std::sort(chosen.begin(), chosen.end());
      features = chosen;
    }

    // An impure classification node with no improving split still takes the
    // first valid zero-gain split, so symmetric patterns such as XOR can be
    // resolved one level further down.
    const auto split =
        search(data, ops, rows, weights, features, params.min_instances_per_node, target.num_classes > 0);
    if (!split) return idx;

    std::vector<std::uint32_t> left_rows;
    std::vector<std::uint32_t> right_rows;
    for (auto r : rows) {
      (data.bin_of(r, split->split.feature) <= split->bin ? left_rows : right_rows).push_back(r);
    }
    std::vector<std::uint32_t>().swap(rows);

    const auto left = build(left_rows, depth + 1);
    const auto right = build(right_rows, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
    node.leaf = false;
    node.feature = static_cast<std::uint32_t>(split->split.feature);
    node.threshold = split->split.threshold;
    node.impurity_gain = split->split.gain;
    node.left = left;
    node.right = right;
    node.distribution.clear();
    node.value = 0.0;
    return idx;
  };
  build(root_rows, 0);
  return tree;
}

}  // namespace detail

double gini(std::span<const double> class_counts) {
  const double n = std::accumulate(class_counts.begin(), class_counts.end(), 0.0);
  if (class_counts.empty() || !(n > 0.0)) throw_data("gini: empty class counts");
  double sum_sq = 0.0;
  for (double c : class_counts) sum_sq += (c / n) * (c / n);
  return 1.0 - sum_sq;
}

std::vector<double> candidate_thresholds(std::vector<double> values, std::size_t max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : values) {
    if (!distinct.empty() && distinct.back() == v) {
      ++counts.back();
    } else {
      distinct.push_back(v);
      counts.push_back(1);
    }
  }
  return detail::thresholds_from_distinct(distinct, counts, max_bins);
}

std::optional<Split> best_split(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                                std::span<const std::size_t> feature_subset, std::size_t max_bins) {
  if (X.size() < 2) throw_data("best_split needs at least 2 rows");
  if (X.size() != y.size()) throw_data("features/labels length mismatch");
  const detail::BinnedMatrix data(X, max_bins);
  for (auto f : feature_subset) {
    if (f >= data.dimension()) throw_data("feature subset index out of range");
  }
  std::vector<std::uint32_t> rows(X.size());
  std::iota(rows.begin(), rows.end(), 0u);
  const std::vector<std::uint32_t> weights(X.size(), 1);
  const detail::Target target{num_classes, y, {}, {}};
  return detail::find_split(data, target, rows, weights, feature_subset, 1);
}

const TreeNode& DecisionTree::leaf_for(const FeatureVector& x) const {
  if (nodes.empty()) throw_data("empty tree");
  std::size_t i = 0;
  while (!nodes[i].leaf) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[n.feature] <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(std::size_t)> rec = [&](std::size_t i) -> std::size_t {
    if (nodes[i].leaf) return 0;
    return 1 + std::max(rec(static_cast<std::size_t>(nodes[i].left)), rec(static_cast<std::size_t>(nodes[i].right)));
  };
  return nodes.empty() ? 0 : rec(0);
}

namespace {

void check_labels(std::span<const FeatureVector> X, std::span<const int> y, int num_classes) {
  if (X.empty()) throw_data("tree: empty training data");
  if (X.size() != y.size()) throw_data("features/labels length mismatch");
  if (num_classes < 1) throw_config("tree: num_classes must be positive");
  for (int v : y) {
    if (v < 0 || v >= num_classes) throw_data("label " + std::to_string(v) + " out of range");
  }
}

}  // namespace

DecisionTree train_decision_tree(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                                 const TreeConfig& cfg) {
  check_labels(X, y, num_classes);
  const detail::BinnedMatrix data(X, cfg.max_bins);
  const std::vector<std::uint32_t> weights(X.size(), 1);
  detail::GrowParams params;
  params.max_depth = cfg.max_depth;
  params.min_instances_per_node = std::max<std::size_t>(1, cfg.min_instances_per_node);
  return detail::grow_tree(data, detail::Target{num_classes, y, {}, {}}, weights, params);
}

TreePrediction predict_tree(const DecisionTree& tree, const FeatureVector& x) {
  if (tree.num_classes == 0) throw_config("predict_tree needs a classification tree");
  const auto& leaf = tree.leaf_for(x);
  TreePrediction p;
  p.distribution = leaf.distribution;
  p.label = static_cast<int>(std::max_element(p.distribution.begin(), p.distribution.end()) -
                             p.distribution.begin());
  return p;
}

}  // namespace bookml
