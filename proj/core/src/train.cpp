#include "guirec/train.hpp"

#include <cmath>
#include <string>

#include "guirec/errors.hpp"
#include "guirec/loss.hpp"

namespace guirec {

void adagrad_update(RecurrentModel& model, const Parameters& grad) {
  const double lr = model.config.learning_rate;
  const double eps = model.config.adagrad_epsilon;
  std::vector<std::span<double>> params;
  std::vector<std::span<double>> accumulators;
  std::vector<std::span<const double>> grads;
  model.params.for_each_tensor([&](std::string_view, std::span<double> v) { params.push_back(v); });
  model.adagrad_accumulator.for_each_tensor([&](std::string_view, std::span<double> v) { accumulators.push_back(v); });
  grad.for_each_tensor([&](std::string_view, std::span<const double> v) { grads.push_back(v); });
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto p = params[t];
    auto acc = accumulators[t];
    auto g = grads[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (g[i] == 0.0) continue;
      acc[i] += g[i] * g[i];
      p[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
      if (!std::isfinite(p[i])) throw NumericError("non-finite parameter after Adagrad update");
    }
  }
}

TrainResult train(const SessionLog& log, const NetworkConfig& cfg, const ProgressSink& progress) {
  return train(log, init_model(cfg), progress);
}

TrainResult train(const SessionLog& log, RecurrentModel model, const ProgressSink& progress) {
  const NetworkConfig& cfg = model.config;
  cfg.validate();
  if (cfg.n_actions < log.catalog.size()) {
    throw ConfigError("model vocabulary (" + std::to_string(cfg.n_actions) + ") smaller than catalog (" +
                      std::to_string(log.catalog.size()) + ")");
  }
  if (cfg.loss_kind != LossKind::cross_entropy && cfg.batch_size < 2) {
    throw ConfigError("ranking losses draw negatives from other lanes; use batch_size >= 2");
  }

  TrainResult result;
  std::vector<const Session*> usable;
  for (const auto& s : log.sessions) {
    if (s.action_ids.size() >= 2) {
      usable.push_back(&s);
    } else {
      ++result.skipped_sessions;
    }
  }
  if (usable.size() < cfg.batch_size) {
    throw ConfigError("only " + std::to_string(usable.size()) + " sessions of length >= 2 for batch_size " +
                      std::to_string(cfg.batch_size) + "; use a smaller batch size");
  }

  const std::size_t lanes = cfg.batch_size;
  struct Lane {
    std::size_t session = 0;
    std::size_t position = 0;
    bool active = false;
    bool fresh = false;
  };

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<Lane> lane(lanes);
    std::size_t next_session = 0;
    for (auto& l : lane) {
      l = {next_session++, 0, true, true};
    }
    HiddenState carried = HiddenState::zeros(cfg.cell_kind, lanes, cfg.hidden_size);

    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0.0;
    std::vector<StepBatch> window;
    window.reserve(cfg.bptt_steps);

    auto any_active = [&] {
      for (const auto& l : lane) {
        if (l.active) return true;
      }
      return false;
    };

    while (any_active()) {
      StepBatch step(lanes);
      for (std::size_t b = 0; b < lanes; ++b) {
        auto& l = lane[b];
        if (!l.active) {
          step[b].active = false;
          continue;
        }
        const auto& ids = usable[l.session]->action_ids;
        step[b].input = ids[l.position];
        step[b].target = ids[l.position + 1];
        step[b].reset = l.fresh;
        l.fresh = false;
      }
      window.push_back(std::move(step));

      // Advance lanes; exhausted sessions hand the lane to the next one.
      for (auto& l : lane) {
        if (!l.active) continue;
        ++l.position;
        if (l.position + 1 >= usable[l.session]->action_ids.size()) {
          if (next_session < usable.size()) {
            l = {next_session++, 0, true, true};
          } else {
            l.active = false;
          }
        }
      }

      if (window.size() == cfg.bptt_steps || !any_active()) {
        auto step_result = loss_and_grad(model, window, carried);
        if (step_result.predictions > 0) {
          adagrad_update(model, step_result.grad);
          ++stats.updates;
        }
        loss_sum += step_result.lane_loss_sum;
        stats.predictions += step_result.predictions;
        carried = std::move(step_result.final_state);
        window.clear();
      }
    }

    if (!std::isfinite(loss_sum)) throw NumericError("non-finite training loss in epoch " + std::to_string(epoch));
    stats.mean_loss = stats.predictions ? loss_sum / static_cast<double>(stats.predictions) : 0.0;
    if (!result.trace.empty()) {
      const double previous = result.trace.back().mean_loss;
      stats.relative_improvement = previous != 0.0 ? (previous - stats.mean_loss) / std::abs(previous) : 0.0;
      if (!result.converged_epoch && *stats.relative_improvement < cfg.convergence_tolerance) {
        result.converged_epoch = epoch;
      }
    }
    result.trace.push_back(stats);
    if (progress) progress(stats);
    if (cfg.stop_at_convergence && result.converged_epoch) break;
  }

  result.model = std::move(model);
  return result;
}

}  // namespace guirec
