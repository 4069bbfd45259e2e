#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bookml/metrics.hpp"
#include "bookml/table.hpp"

namespace bookml {

struct Interaction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double rating = 0.0;
};

// Explicit or implicit feedback with external ids indexed by first
// appearance. A repeated (user, item) pair keeps the last rating.
class InteractionSet {
 public:
  // Returns false when the pair already existed and its rating was replaced.
  bool add(std::string_view user_id, std::string_view item_id, double rating);

  std::size_t num_users() const noexcept { return user_ids_.size(); }
  std::size_t num_items() const noexcept { return item_ids_.size(); }
  const std::vector<Interaction>& triples() const noexcept { return triples_; }
  const std::vector<std::string>& user_ids() const noexcept { return user_ids_; }
  const std::vector<std::string>& item_ids() const noexcept { return item_ids_; }
  std::optional<std::uint32_t> user_index(std::string_view id) const;
  std::optional<std::uint32_t> item_index(std::string_view id) const;

  std::size_t duplicates = 0;
  std::size_t dropped_null = 0;

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, std::uint32_t> user_index_;
  std::unordered_map<std::string, std::uint32_t> item_index_;
  std::unordered_map<std::uint64_t, std::size_t> pair_slot_;
  std::vector<Interaction> triples_;
};

// Rows with a null id or rating are dropped and counted.
InteractionSet build_interactions(const Table& t, std::string_view user_col, std::string_view item_col,
                                  std::string_view rating_col);

struct ALSConfig {
  std::size_t rank = 10;
  double reg = 0.1;
  std::size_t max_sweeps = 10;
  double alpha = 40.0;
  bool implicit = false;
  std::uint64_t seed = 0;
};

struct FactorModel {
  std::size_t rank = 0;
  std::vector<double> user_factors;  // num_users x rank, row-major
  std::vector<double> item_factors;  // num_items x rank, row-major
  double global_mean = 0.0;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::vector<std::uint64_t> item_popularity;  // training interactions per item
  ALSConfig config;
  // Regularized objective: the initial value, then one entry per half-sweep.
  std::vector<double> objective_trace;

  std::size_t num_users() const noexcept { return user_ids.size(); }
  std::size_t num_items() const noexcept { return item_ids.size(); }
  std::span<const double> user(std::size_t u) const {
    return std::span<const double>(user_factors).subspan(u * rank, rank);
  }
  std::span<const double> item(std::size_t i) const {
    return std::span<const double>(item_factors).subspan(i * rank, rank);
  }

  // Rebuilds the id lookup tables; call after editing the id vectors.
  void index_ids();
  std::optional<std::uint32_t> user_index(std::string_view id) const;
  std::optional<std::uint32_t> item_index(std::string_view id) const;

 private:
  std::unordered_map<std::string, std::uint32_t> user_lookup_;
  std::unordered_map<std::string, std::uint32_t> item_lookup_;
};

// Minimizes sum over observed (r - u.v)^2 + reg * (|U|^2 + |V|^2) by exact
// alternating ridge solves, users first. Item factors start at
// uniform(-0.5, 0.5) / sqrt(rank).
FactorModel train_als_explicit(const InteractionSet& data, const ALSConfig& cfg);

// Implicit feedback: preference 1 if r > 0 else 0, confidence 1 + alpha * r,
// summed over every (user, item) pair. Each solve uses V^T V plus the
// observed-entry correction, so cost scales with the observed entries.
FactorModel train_als_implicit(const InteractionSet& data, const ALSConfig& cfg);

double implicit_confidence(double alpha, double rating);

struct Score {
  double value = 0.0;
  bool cold_start = false;
};

// Out-of-range indices fall back to the global mean.
Score score(const FactorModel& m, std::size_t user, std::size_t item);
Score score(const FactorModel& m, std::string_view user_id, std::string_view item_id);

struct ScoredItem {
  std::uint32_t item = 0;
  std::string item_id;
  double score = 0.0;
};

struct Recommendation {
  std::vector<ScoredItem> items;
  bool cold_start = false;
};

// Highest scores first, ties to the lower item index. With exclude_seen the
// items `seen` records for the user are skipped. An unknown user gets the
// most popular items instead, flagged as cold start.
Recommendation recommend_top_n(const FactorModel& m, std::string_view user_id, std::size_t n, bool exclude_seen,
                               const InteractionSet* seen);

struct RatedPair {
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
};

struct HoldoutSplit {
  InteractionSet train;
  std::vector<RatedPair> test;
};

// Holds out one seeded-random rating of every user with at least two.
HoldoutSplit holdout_per_user(const InteractionSet& data, std::uint64_t seed);

struct HoldoutEvaluation {
  RegressionMetrics metrics;
  std::size_t evaluated = 0;
  std::size_t cold_start = 0;
};

HoldoutEvaluation evaluate_holdout(const FactorModel& m, std::span<const RatedPair> test);

}  // namespace bookml
