#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "bookml/linear.hpp"
#include "bookml/recommender.hpp"
#include "bookml/rng.hpp"
#include "bookml/tree.hpp"

namespace {

struct Data {
  std::vector<bookml::FeatureVector> X;
  std::vector<int> y;
};

Data sparse_data(std::size_t rows, std::size_t dim, int classes) {
  bookml::Rng rng(1);
  Data d;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    for (std::size_t j = 0; j < dim; ++j) {
      if (bookml::uniform01(rng) < 0.05) {
        idx.push_back(static_cast<std::uint32_t>(j));
        val.push_back(bookml::uniform01(rng));
      }
    }
    d.X.push_back(bookml::FeatureVector::sparse(dim, std::move(idx), std::move(val)));
    d.y.push_back(static_cast<int>(bookml::uniform_index(rng, static_cast<std::uint64_t>(classes))));
  }
  return d;
}

void BM_LogisticObjective(benchmark::State& state) {
  const auto d = sparse_data(static_cast<std::size_t>(state.range(0)), 1000, 5);
  const auto m = bookml::LinearModel::zeros(bookml::LinearKind::Logistic, 5, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(bookml::logistic_objective(m, d.X, d.y, 0.01).loss);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * d.X.size()));
}
BENCHMARK(BM_LogisticObjective)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DecisionTree(benchmark::State& state) {
  const auto d = sparse_data(static_cast<std::size_t>(state.range(0)), 200, 2);
  bookml::TreeConfig cfg;
  cfg.max_depth = 5;
  for (auto _ : state) benchmark::DoNotOptimize(bookml::train_decision_tree(d.X, d.y, 2, cfg).nodes.size());
}
BENCHMARK(BM_DecisionTree)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_RandomForest(benchmark::State& state) {
  const auto d = sparse_data(5000, 200, 2);
  bookml::ForestConfig cfg;
  cfg.num_trees = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bookml::train_random_forest(d.X, d.y, 2, cfg).trees.size());
}
BENCHMARK(BM_RandomForest)->Arg(10)->Unit(benchmark::kMillisecond);

bookml::InteractionSet interactions(std::size_t users, std::size_t items, std::size_t per_user) {
  bookml::Rng rng(2);
  bookml::InteractionSet d;
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t k = 0; k < per_user; ++k) {
      d.add("u" + std::to_string(u), "i" + std::to_string(bookml::uniform_index(rng, items)),
            1.0 + static_cast<double>(bookml::uniform_index(rng, 5)));
    }
  }
  return d;
}

void BM_AlsSweep(benchmark::State& state) {
  const auto d = interactions(5000, 2000, 10);
  bookml::ALSConfig cfg;
  cfg.rank = static_cast<std::size_t>(state.range(0));
  cfg.max_sweeps = 1;
  cfg.implicit = state.range(1) != 0;
  for (auto _ : state) {
    auto m = cfg.implicit ? bookml::train_als_implicit(d, cfg) : bookml::train_als_explicit(d, cfg);
    benchmark::DoNotOptimize(m.user_factors.data());
  }
}
BENCHMARK(BM_AlsSweep)->Args({10, 0})->Args({10, 1})->Args({32, 0})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
