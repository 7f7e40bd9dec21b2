#pragma once

#include <optional>
#include <span>
#include <vector>

#include "guirec/network.hpp"

namespace guirec {

// One lane of one mini-batch step.
struct LaneStep {
  ActionId input = 1;
  ActionId target = 1;
  bool active = true;  // inactive lanes still advance but contribute no loss
  bool reset = false;  // zero this lane's hidden state before consuming input
  // Explicit negatives for ranking losses. When absent, the distinct targets
  // of the other active lanes (minus this lane's target) are used.
  std::optional<std::vector<ActionId>> negatives;
};

// All lanes of one step; every step of a window has the same lane count.
using StepBatch = std::vector<LaneStep>;

struct LossResult {
  double loss = 0.0;         // sum over steps of the mean lane loss
  double lane_loss_sum = 0.0;  // sum of every counted lane loss
  std::size_t predictions = 0; // number of counted lanes over the window
  Parameters grad;
  HiddenState final_state;
};

// Scalar losses for one prediction.
double cross_entropy_loss(std::span<const double> scores, std::size_t positive);
double bpr_loss(double positive_score, std::span<const double> negative_scores);
double top1_loss(double positive_score, std::span<const double> negative_scores);

// Runs the window forward from `initial` (empty = zeros), computes the
// configured loss and backpropagates through every step of the window.
// Hidden state entering the window is treated as a constant.
// Throws ValidationError for explicit negatives that are empty or contain
// the positive.
LossResult loss_and_grad(const RecurrentModel& model, std::span<const StepBatch> window,
                         const HiddenState& initial = {});

// Forward pass only; same loss value as loss_and_grad.
double evaluate_loss(const RecurrentModel& model, std::span<const StepBatch> window, const HiddenState& initial = {});

}  // namespace guirec
