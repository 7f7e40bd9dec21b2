#include <benchmark/benchmark.h>

#include <random>

#include "guirec/loss.hpp"
#include "guirec/network.hpp"
#include "guirec/train.hpp"

using namespace guirec;

namespace {

NetworkConfig config(CellKind cell, LossKind loss, std::size_t hidden, std::size_t actions) {
  NetworkConfig cfg;
  cfg.n_actions = actions;
  cfg.hidden_size = hidden;
  cfg.cell_kind = cell;
  cfg.loss_kind = loss;
  cfg.batch_size = 32;
  return cfg;
}

std::vector<StepBatch> batch(std::size_t lanes, std::size_t actions, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::vector<StepBatch> window(1, StepBatch(lanes));
  for (auto& lane : window[0]) {
    lane.input = static_cast<ActionId>(1 + gen() % actions);
    lane.target = static_cast<ActionId>(1 + gen() % actions);
  }
  return window;
}

// One mini-batch step (forward, loss, backward, Adagrad) at replication size.
void BM_TrainStep(benchmark::State& state) {
  const auto cell = state.range(0) == 0 ? CellKind::gru : CellKind::lstm;
  const auto loss = static_cast<LossKind>(state.range(1));
  auto model = init_model(config(cell, loss, 100, 522));
  const auto window = batch(32, 522, 1);
  for (auto _ : state) {
    auto r = loss_and_grad(model, window);
    adagrad_update(model, r.grad);
    benchmark::DoNotOptimize(r.loss);
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TrainStep)
    ->ArgsProduct({{0, 1}, {static_cast<long>(LossKind::cross_entropy), static_cast<long>(LossKind::bpr),
                            static_cast<long>(LossKind::top1)}});

void BM_CellStep(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const auto model = init_model(config(CellKind::gru, LossKind::top1, hidden, 522));
  auto h = HiddenState::zeros(CellKind::gru, 1, hidden);
  ActionId a = 1;
  for (auto _ : state) {
    h = cell_step(model, a, h);
    a = a % 522 + 1;
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_CellStep)->Arg(16)->Arg(100)->Arg(256);

}  // namespace
