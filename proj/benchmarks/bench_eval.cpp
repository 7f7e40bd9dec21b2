#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "guirec/eval.hpp"
#include "guirec/knn.hpp"
#include "guirec/rnn_recommender.hpp"

using namespace guirec;

namespace {

SessionLog corpus(std::size_t sessions, std::size_t actions) {
  SessionLog log;
  for (std::size_t a = 1; a <= actions; ++a) log.catalog.intern({"/p", "//el[" + std::to_string(a) + "]", ActionType::click});
  std::mt19937 gen(9);
  for (std::size_t s = 0; s < sessions; ++s) {
    Session session;
    session.session_id = s + 1;
    session.start_timestamp = static_cast<std::int64_t>(s);
    const std::size_t len = 2 + gen() % 25;
    for (std::size_t i = 0; i < len; ++i) session.action_ids.push_back(static_cast<ActionId>(1 + gen() % actions));
    log.sessions.push_back(std::move(session));
  }
  return log;
}

// Incremental-reveal evaluation of an untrained replication-size GRU.
void BM_EvaluateRnn(benchmark::State& state) {
  const auto test = corpus(static_cast<std::size_t>(state.range(0)), 522);
  NetworkConfig cfg;
  cfg.n_actions = 522;
  auto model = std::make_shared<const RecurrentModel>(init_model(cfg));
  const RnnRecommender rec(model, "gru");
  for (auto _ : state) benchmark::DoNotOptimize(sequential_evaluate(rec, test, EvalConfig{}));
}
BENCHMARK(BM_EvaluateRnn)->Arg(100)->Arg(700)->Unit(benchmark::kMillisecond);

void BM_EvaluateKnn(benchmark::State& state) {
  const auto log = corpus(700, 522);
  const KnnRecommender rec(fit_knn(log));
  for (auto _ : state) benchmark::DoNotOptimize(sequential_evaluate(rec, log, EvalConfig{}));
}
BENCHMARK(BM_EvaluateKnn)->Unit(benchmark::kMillisecond);

}  // namespace
