#include <benchmark/benchmark.h>

#include <random>

#include "guirec/knn.hpp"

using namespace guirec;

namespace {

SessionLog corpus(std::size_t sessions, std::size_t actions) {
  SessionLog log;
  for (std::size_t a = 1; a <= actions; ++a) {
    log.catalog.intern({"/p", "//el[" + std::to_string(a) + "]", ActionType::click});
  }
  std::mt19937 gen(3);
  for (std::size_t s = 0; s < sessions; ++s) {
    Session session;
    session.session_id = s + 1;
    session.start_timestamp = static_cast<std::int64_t>(s);
    const std::size_t len = 1 + gen() % 30;
    for (std::size_t i = 0; i < len; ++i) session.action_ids.push_back(static_cast<ActionId>(1 + gen() % actions));
    log.sessions.push_back(std::move(session));
  }
  return log;
}

void BM_FitKnn(benchmark::State& state) {
  const auto log = corpus(static_cast<std::size_t>(state.range(0)), 522);
  for (auto _ : state) benchmark::DoNotOptimize(fit_knn(log));
}
BENCHMARK(BM_FitKnn)->Arg(500)->Arg(3526)->Unit(benchmark::kMillisecond);

void BM_KnnRecommend(benchmark::State& state) {
  const auto matrix = fit_knn(corpus(3526, 522));
  ActionId a = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn_recommend(matrix, a, 20));
    a = a % 522 + 1;
  }
}
BENCHMARK(BM_KnnRecommend);

}  // namespace
