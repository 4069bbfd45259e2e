#include "bookml/recommender.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "bookml/error.hpp"
#include "bookml/parallel.hpp"
#include "bookml/rng.hpp"

namespace bookml {

bool InteractionSet::add(std::string_view user_id, std::string_view item_id, double rating) {
  const auto intern = [](std::string_view id, std::vector<std::string>& ids,
                         std::unordered_map<std::string, std::uint32_t>& index) {
    auto [it, inserted] = index.try_emplace(std::string(id), static_cast<std::uint32_t>(ids.size()));
    if (inserted) ids.emplace_back(id);
    return it->second;
  };
  const auto u = intern(user_id, user_ids_, user_index_);
  const auto i = intern(item_id, item_ids_, item_index_);
  const std::uint64_t key = (std::uint64_t{u} << 32) | i;
  const auto [slot, inserted] = pair_slot_.try_emplace(key, triples_.size());
  if (!inserted) {
    triples_[slot->second].rating = rating;
    ++duplicates;
    return false;
  }
  triples_.push_back(Interaction{u, i, rating});
  return true;
}

std::optional<std::uint32_t> InteractionSet::user_index(std::string_view id) const {
  const auto it = user_index_.find(std::string(id));
  return it == user_index_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<std::uint32_t> InteractionSet::item_index(std::string_view id) const {
  const auto it = item_index_.find(std::string(id));
  return it == item_index_.end() ? std::nullopt : std::optional(it->second);
}

InteractionSet build_interactions(const Table& t, std::string_view user_col, std::string_view item_col,
                                  std::string_view rating_col) {
  const auto& users = t.column(user_col);
  const auto& items = t.column(item_col);
  const auto& ratings = t.column(rating_col);
  if (users.dtype() != DType::Text || items.dtype() != DType::Text) throw_data("user and item columns must be text");
  if (!is_numeric(ratings.dtype())) throw_data("rating column must be numeric");

  InteractionSet set;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    if (users.is_null(r) || items.is_null(r) || ratings.is_null(r)) {
      ++set.dropped_null;
      continue;
    }
    set.add(users.values<std::string>()[r], items.values<std::string>()[r], ratings.numeric(r));
  }
  if (set.triples().empty()) throw_data("no usable (user, item, rating) triples");
  return set;
}

void FactorModel::index_ids() {
  user_lookup_.clear();
  item_lookup_.clear();
  for (std::size_t u = 0; u < user_ids.size(); ++u) user_lookup_.emplace(user_ids[u], static_cast<std::uint32_t>(u));
  for (std::size_t i = 0; i < item_ids.size(); ++i) item_lookup_.emplace(item_ids[i], static_cast<std::uint32_t>(i));
}

std::optional<std::uint32_t> FactorModel::user_index(std::string_view id) const {
  const auto it = user_lookup_.find(std::string(id));
  return it == user_lookup_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<std::uint32_t> FactorModel::item_index(std::string_view id) const {
  const auto it = item_lookup_.find(std::string(id));
  return it == item_lookup_.end() ? std::nullopt : std::optional(it->second);
}

double implicit_confidence(double alpha, double rating) { return 1.0 + alpha * rating; }

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<RowMatrix>;
using ConstMap = Eigen::Map<const RowMatrix>;

struct Adjacency {
  std::vector<std::size_t> ptr;
  std::vector<std::uint32_t> other;
  std::vector<double> rating;
};

Adjacency adjacency(const InteractionSet& data, bool by_user) {
  const std::size_t n = by_user ? data.num_users() : data.num_items();
  Adjacency a;
  a.ptr.assign(n + 1, 0);
  for (const auto& t : data.triples()) ++a.ptr[(by_user ? t.user : t.item) + 1];
  std::partial_sum(a.ptr.begin(), a.ptr.end(), a.ptr.begin());
  a.other.resize(data.triples().size());
  a.rating.resize(data.triples().size());
  auto fill = a.ptr;
  for (const auto& t : data.triples()) {
    const auto slot = fill[by_user ? t.user : t.item]++;
    a.other[slot] = by_user ? t.item : t.user;
    a.rating[slot] = t.rating;
  }
  return a;
}

void check_config(const InteractionSet& data, const ALSConfig& cfg) {
  if (data.triples().empty()) throw_data("ALS needs at least one interaction");
  if (cfg.rank == 0) throw_config("ALS rank must be positive");
  if (cfg.reg < 0.0) throw_config("ALS reg must be nonnegative");
}

FactorModel init_model(const InteractionSet& data, const ALSConfig& cfg) {
  FactorModel m;
  m.rank = cfg.rank;
  m.config = cfg;
  m.user_ids = data.user_ids();
  m.item_ids = data.item_ids();
  m.index_ids();
  m.user_factors.assign(data.num_users() * cfg.rank, 0.0);
  m.item_factors.resize(data.num_items() * cfg.rank);
  Rng rng(cfg.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.rank));
  for (auto& v : m.item_factors) v = (uniform01(rng) - 0.5) * scale;
  m.item_popularity.assign(data.num_items(), 0);
  double sum = 0.0;
  for (const auto& t : data.triples()) {
    ++m.item_popularity[t.item];
    sum += t.rating;
  }
  m.global_mean = sum / static_cast<double>(data.triples().size());
  return m;
}

// Solves (gram + sum w_j x_j x_j^T + reg I) f = sum b_j x_j for every row of
// `solve_for`, with x_j taken from `fixed`.
void solve_half(std::vector<double>& solve_for, const std::vector<double>& fixed, const Adjacency& adj,
                std::size_t rank, double reg, const RowMatrix* gram, double alpha, bool implicit) {
  const std::size_t n = adj.ptr.size() - 1;
  const ConstMap F(fixed.data(), static_cast<Eigen::Index>(fixed.size() / rank), static_cast<Eigen::Index>(rank));
  Map X(solve_for.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank));
  const auto r = static_cast<Eigen::Index>(rank);

  parallel_for(n, [&](std::size_t row) {
    RowMatrix A = gram ? *gram : RowMatrix::Zero(r, r);
    A.diagonal().array() += reg;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(r);
    for (std::size_t k = adj.ptr[row]; k < adj.ptr[row + 1]; ++k) {
      const auto x = F.row(adj.other[k]).transpose();
      if (implicit) {
        const double c = implicit_confidence(alpha, adj.rating[k]);
        const double p = adj.rating[k] > 0.0 ? 1.0 : 0.0;
        A.noalias() += (c - 1.0) * x * x.transpose();
        b.noalias() += c * p * x;
      } else {
        A.noalias() += x * x.transpose();
        b.noalias() += adj.rating[k] * x;
      }
    }
    Eigen::LLT<RowMatrix> llt(A);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
      throw_numeric("ALS: singular normal equations (increase reg)");
    }
    X.row(static_cast<Eigen::Index>(row)) = llt.solve(b).transpose();
  });
  for (double v : solve_for) {
    if (!std::isfinite(v)) throw_numeric("ALS: non-finite factor");
  }
}

double squared_norm(const std::vector<double>& v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double explicit_objective(const FactorModel& m, const InteractionSet& data, double reg) {
  double loss = 0.0;
  for (const auto& t : data.triples()) {
    const double e = t.rating - dot(m.user(t.user), m.item(t.item));
    loss += e * e;
  }
  return loss + reg * (squared_norm(m.user_factors) + squared_norm(m.item_factors));
}

RowMatrix gram(const std::vector<double>& factors, std::size_t rank) {
  const ConstMap F(factors.data(), static_cast<Eigen::Index>(factors.size() / rank), static_cast<Eigen::Index>(rank));
  return F.transpose() * F;
}

double implicit_objective(const FactorModel& m, const InteractionSet& data, double reg, double alpha) {
  // Every pair contributes s^2 at confidence 1 with preference 0; observed
  // pairs replace that with c (p - s)^2.
  const RowMatrix vtv = gram(m.item_factors, m.rank);
  const ConstMap U(m.user_factors.data(), static_cast<Eigen::Index>(m.num_users()), static_cast<Eigen::Index>(m.rank));
  double loss = (U * vtv).cwiseProduct(U).sum();
  for (const auto& t : data.triples()) {
    const double s = dot(m.user(t.user), m.item(t.item));
    const double c = implicit_confidence(alpha, t.rating);
    const double p = t.rating > 0.0 ? 1.0 : 0.0;
    loss += c * (p - s) * (p - s) - s * s;
  }
  return loss + reg * (squared_norm(m.user_factors) + squared_norm(m.item_factors));
}

FactorModel train(const InteractionSet& data, const ALSConfig& cfg, bool implicit) {
  check_config(data, cfg);
  if (implicit) {
    if (!(cfg.alpha > 0.0)) throw_config("implicit ALS needs alpha > 0");
    for (const auto& t : data.triples()) {
      if (t.rating < 0.0) throw_data("implicit ALS: negative rating");
    }
  }
  FactorModel m = init_model(data, cfg);
  m.config.implicit = implicit;
  const auto by_user = adjacency(data, true);
  const auto by_item = adjacency(data, false);
  const auto objective = [&] {
    const double v = implicit ? implicit_objective(m, data, cfg.reg, cfg.alpha) : explicit_objective(m, data, cfg.reg);
    if (!std::isfinite(v)) throw_numeric("ALS: non-finite objective");
    return v;
  };
  m.objective_trace.push_back(objective());
  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    RowMatrix g;
    if (implicit) g = gram(m.item_factors, m.rank);
    solve_half(m.user_factors, m.item_factors, by_user, m.rank, cfg.reg, implicit ? &g : nullptr, cfg.alpha, implicit);
    m.objective_trace.push_back(objective());
    if (implicit) g = gram(m.user_factors, m.rank);
    solve_half(m.item_factors, m.user_factors, by_item, m.rank, cfg.reg, implicit ? &g : nullptr, cfg.alpha, implicit);
    m.objective_trace.push_back(objective());
  }
  return m;
}

}  // namespace

FactorModel train_als_explicit(const InteractionSet& data, const ALSConfig& cfg) {
  return train(data, cfg, false);
}

FactorModel train_als_implicit(const InteractionSet& data, const ALSConfig& cfg) {
  return train(data, cfg, true);
}

Score score(const FactorModel& m, std::size_t user, std::size_t item) {
  if (user >= m.num_users() || item >= m.num_items()) return Score{m.global_mean, true};
  return Score{dot(m.user(user), m.item(item)), false};
}

Score score(const FactorModel& m, std::string_view user_id, std::string_view item_id) {
  const auto u = m.user_index(user_id);
  const auto i = m.item_index(item_id);
  if (!u || !i) return Score{m.global_mean, true};
  return score(m, *u, *i);
}

Recommendation recommend_top_n(const FactorModel& m, std::string_view user_id, std::size_t n, bool exclude_seen,
                               const InteractionSet* seen) {
  if (n == 0) throw_config("recommend: n must be at least 1");
  Recommendation rec;
  std::vector<ScoredItem> all;
  const auto u = m.user_index(user_id);
  std::vector<char> skip(m.num_items(), 0);
  if (exclude_seen && seen != nullptr) {
    if (const auto su = seen->user_index(user_id)) {
      for (const auto& t : seen->triples()) {
        if (t.user != *su) continue;
        if (const auto mi = m.item_index(seen->item_ids()[t.item])) skip[*mi] = 1;
      }
    }
  }
  all.reserve(m.num_items());
  for (std::size_t i = 0; i < m.num_items(); ++i) {
    if (skip[i]) continue;
    const double s = u ? dot(m.user(*u), m.item(i)) : static_cast<double>(m.item_popularity[i]);
    all.push_back(ScoredItem{static_cast<std::uint32_t>(i), m.item_ids[i], s});
  }
  rec.cold_start = !u;
  const auto k = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    [](const ScoredItem& a, const ScoredItem& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.item < b.item;
                    });
  all.resize(k);
  rec.items = std::move(all);
  return rec;
}

HoldoutSplit holdout_per_user(const InteractionSet& data, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> per_user(data.num_users());
  for (std::size_t k = 0; k < data.triples().size(); ++k) per_user[data.triples()[k].user].push_back(k);
  Rng rng(seed);
  std::vector<char> held(data.triples().size(), 0);
  for (const auto& slots : per_user) {
    if (slots.size() >= 2) held[slots[uniform_index(rng, slots.size())]] = 1;
  }
  HoldoutSplit split;
  for (std::size_t k = 0; k < data.triples().size(); ++k) {
    const auto& t = data.triples()[k];
    if (held[k]) {
      split.test.push_back(RatedPair{data.user_ids()[t.user], data.item_ids()[t.item], t.rating});
    } else {
      split.train.add(data.user_ids()[t.user], data.item_ids()[t.item], t.rating);
    }
  }
  return split;
}

HoldoutEvaluation evaluate_holdout(const FactorModel& m, std::span<const RatedPair> test) {
  HoldoutEvaluation ev;
  std::vector<double> preds;
  std::vector<double> truth;
  for (const auto& p : test) {
    const auto s = score(m, p.user_id, p.item_id);
    ev.cold_start += s.cold_start ? 1 : 0;
    preds.push_back(s.value);
    truth.push_back(p.rating);
  }
  ev.evaluated = test.size();
  ev.metrics = evaluate_regression(preds, truth);
  return ev;
}

}  // namespace bookml
