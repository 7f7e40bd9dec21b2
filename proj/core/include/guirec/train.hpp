#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "guirec/catalog.hpp"
#include "guirec/network.hpp"

namespace guirec {

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;  // mean loss per counted prediction
  std::size_t predictions = 0;
  std::size_t updates = 0;
  // (previous - current) / previous; absent for the first epoch.
  std::optional<double> relative_improvement;
};

struct TrainResult {
  RecurrentModel model;
  std::vector<EpochStats> trace;
  std::size_t skipped_sessions = 0;  // length-1 sessions: no input/target pair
  std::optional<std::size_t> converged_epoch;
};

using ProgressSink = std::function<void(const EpochStats&)>;

// Session-parallel mini-batch training with Adagrad.
//
// B lanes each walk one session: at every step a lane feeds its current
// action and targets the following one. A lane whose session is exhausted
// takes the next unstarted session and resets its hidden state to zero;
// lanes with nothing left go inactive. Ranking losses use the other lanes'
// targets as negatives. Parameters are updated after every bptt_steps steps.
//
// Throws ConfigError when fewer than batch_size usable sessions exist or a
// ranking loss is combined with batch_size 1, and NumericError if any
// parameter becomes non-finite.
TrainResult train(const SessionLog& log, const NetworkConfig& cfg, const ProgressSink& progress = {});

// Continues training an existing model for cfg.epochs more passes.
TrainResult train(const SessionLog& log, RecurrentModel model, const ProgressSink& progress = {});

// One Adagrad update: acc += g², θ -= lr · g / (sqrt(acc) + ε).
void adagrad_update(RecurrentModel& model, const Parameters& grad);

}  // namespace guirec
