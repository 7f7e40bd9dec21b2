#include "guirec/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "guirec/errors.hpp"

namespace guirec {

namespace {

// log σ(x) without overflow.
double log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double sigmoid_derivative(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

double log_sum_exp(std::span<const double> scores) {
  const double max = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - max);
  return max + std::log(sum);
}

// Per-step scoring plan: which output columns are scored, and for each
// counted lane the column of its positive and of its negatives.
struct LanePlan {
  Eigen::Index lane;
  Eigen::Index positive;
  std::vector<Eigen::Index> negatives;
};

struct StepPlan {
  std::vector<ActionId> columns;  // scored actions; empty means all actions
  std::vector<LanePlan> lanes;
};

StepPlan plan_step(const StepBatch& step, LossKind loss_kind, std::size_t n_actions) {
  StepPlan plan;
  auto check = [&](ActionId a) {
    if (a < 1 || a > n_actions) {
      throw std::out_of_range("target action " + std::to_string(a) + " outside 1.." + std::to_string(n_actions));
    }
  };
  if (loss_kind == LossKind::cross_entropy) {
    for (std::size_t b = 0; b < step.size(); ++b) {
      if (!step[b].active) continue;
      check(step[b].target);
      plan.lanes.push_back({static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(step[b].target - 1), {}});
    }
    return plan;
  }

  std::vector<std::vector<ActionId>> negatives(step.size());
  for (std::size_t b = 0; b < step.size(); ++b) {
    if (!step[b].active) continue;
    check(step[b].target);
    auto& neg = negatives[b];
    if (step[b].negatives) {
      neg = *step[b].negatives;
      if (neg.empty()) throw ValidationError("ranking loss needs a non-empty negative set");
      std::sort(neg.begin(), neg.end());
      neg.erase(std::unique(neg.begin(), neg.end()), neg.end());
      if (std::binary_search(neg.begin(), neg.end(), step[b].target)) {
        throw ValidationError("negative set contains the positive action " + std::to_string(step[b].target));
      }
    } else {
      for (std::size_t j = 0; j < step.size(); ++j) {
        if (j != b && step[j].active && step[j].target != step[b].target) neg.push_back(step[j].target);
      }
      std::sort(neg.begin(), neg.end());
      neg.erase(std::unique(neg.begin(), neg.end()), neg.end());
    }
    for (ActionId a : neg) check(a);
  }

  for (std::size_t b = 0; b < step.size(); ++b) {
    if (!step[b].active || negatives[b].empty()) continue;
    plan.columns.push_back(step[b].target);
    plan.columns.insert(plan.columns.end(), negatives[b].begin(), negatives[b].end());
  }
  std::sort(plan.columns.begin(), plan.columns.end());
  plan.columns.erase(std::unique(plan.columns.begin(), plan.columns.end()), plan.columns.end());
  auto column_of = [&](ActionId a) {
    return static_cast<Eigen::Index>(std::lower_bound(plan.columns.begin(), plan.columns.end(), a) - plan.columns.begin());
  };
  for (std::size_t b = 0; b < step.size(); ++b) {
    if (!step[b].active || negatives[b].empty()) continue;
    LanePlan lane{static_cast<Eigen::Index>(b), column_of(step[b].target), {}};
    for (ActionId a : negatives[b]) lane.negatives.push_back(column_of(a));
    plan.lanes.push_back(std::move(lane));
  }
  return plan;
}

struct StepForward {
  StepCache cache;
  HiddenState state;
  StepPlan plan;
  Eigen::MatrixXd weights;  // scored output columns, H x K (unused when scoring all)
  Eigen::MatrixXd scores;   // lanes x K
};

// Loss of one step and, when `d_scores` is given, dLoss/dScores.
double step_loss(LossKind kind, const StepPlan& plan, const Eigen::MatrixXd& scores, Eigen::MatrixXd* d_scores,
                 double* lane_loss_sum) {
  if (plan.lanes.empty()) return 0.0;
  const double lane_weight = 1.0 / static_cast<double>(plan.lanes.size());
  double total = 0.0;
  std::vector<double> row;
  std::vector<double> neg;
  for (const auto& lane : plan.lanes) {
    row.resize(static_cast<std::size_t>(scores.cols()));
    for (Eigen::Index k = 0; k < scores.cols(); ++k) row[static_cast<std::size_t>(k)] = scores(lane.lane, k);
    double loss = 0.0;
    if (kind == LossKind::cross_entropy) {
      loss = cross_entropy_loss(row, static_cast<std::size_t>(lane.positive));
      if (d_scores) {
        const double lse = log_sum_exp(row);
        for (Eigen::Index k = 0; k < scores.cols(); ++k) {
          (*d_scores)(lane.lane, k) += lane_weight * std::exp(row[static_cast<std::size_t>(k)] - lse);
        }
        (*d_scores)(lane.lane, lane.positive) -= lane_weight;
      }
    } else {
      const double pos = row[static_cast<std::size_t>(lane.positive)];
      neg.clear();
      for (auto k : lane.negatives) neg.push_back(row[static_cast<std::size_t>(k)]);
      const double inv_n = 1.0 / static_cast<double>(neg.size());
      if (kind == LossKind::bpr) {
        loss = bpr_loss(pos, neg);
        if (d_scores) {
          for (std::size_t j = 0; j < neg.size(); ++j) {
            const double g = inv_n * (1.0 - sigmoid(pos - neg[j])) * lane_weight;
            (*d_scores)(lane.lane, lane.positive) -= g;
            (*d_scores)(lane.lane, lane.negatives[j]) += g;
          }
        }
      } else {
        loss = top1_loss(pos, neg);
        if (d_scores) {
          for (std::size_t j = 0; j < neg.size(); ++j) {
            const double pair = inv_n * sigmoid_derivative(neg[j] - pos) * lane_weight;
            const double reg = inv_n * 2.0 * neg[j] * sigmoid_derivative(neg[j] * neg[j]) * lane_weight;
            (*d_scores)(lane.lane, lane.positive) -= pair;
            (*d_scores)(lane.lane, lane.negatives[j]) += pair + reg;
          }
        }
      }
    }
    if (lane_loss_sum) *lane_loss_sum += loss;
    total += loss;
  }
  return total * lane_weight;
}

HiddenState reset_lanes(const StepBatch& step, HiddenState state) {
  for (std::size_t b = 0; b < step.size(); ++b) {
    if (!step[b].reset) continue;
    state.hidden.row(static_cast<Eigen::Index>(b)).setZero();
    if (state.cell.size() != 0) state.cell.row(static_cast<Eigen::Index>(b)).setZero();
  }
  return state;
}

std::vector<StepForward> run_forward(const RecurrentModel& model, std::span<const StepBatch> window,
                                     const HiddenState& initial) {
  if (window.empty()) throw std::invalid_argument("loss window is empty");
  const auto& cfg = model.config;
  const std::size_t lanes = window.front().size();
  HiddenState state = initial.hidden.size() == 0 ? HiddenState::zeros(cfg.cell_kind, lanes, cfg.hidden_size) : initial;
  if (state.lanes() != lanes) throw std::invalid_argument("initial hidden state lane count mismatch");

  std::vector<StepForward> steps;
  steps.reserve(window.size());
  std::vector<ActionId> inputs;
  for (const auto& batch : window) {
    if (batch.size() != lanes) throw std::invalid_argument("all steps of a window need the same lane count");
    StepForward fwd;
    inputs.clear();
    for (const auto& lane : batch) inputs.push_back(lane.input);
    state = reset_lanes(batch, std::move(state));
    fwd.state = cell_forward(model.params, cfg.cell_kind, inputs, state, &fwd.cache);
    fwd.plan = plan_step(batch, cfg.loss_kind, cfg.n_actions);
    if (fwd.plan.columns.empty() && cfg.loss_kind == LossKind::cross_entropy) {
      fwd.scores = fwd.state.hidden * model.params.output_weight;
      fwd.scores.rowwise() += model.params.output_bias.transpose();
    } else {
      fwd.weights.resize(model.params.output_weight.rows(), static_cast<Eigen::Index>(fwd.plan.columns.size()));
      Eigen::RowVectorXd bias(static_cast<Eigen::Index>(fwd.plan.columns.size()));
      for (std::size_t k = 0; k < fwd.plan.columns.size(); ++k) {
        fwd.weights.col(static_cast<Eigen::Index>(k)) = model.params.output_weight.col(fwd.plan.columns[k] - 1);
        bias(static_cast<Eigen::Index>(k)) = model.params.output_bias(fwd.plan.columns[k] - 1);
      }
      fwd.scores = fwd.state.hidden * fwd.weights;
      fwd.scores.rowwise() += bias;
    }
    state = fwd.state;
    steps.push_back(std::move(fwd));
  }
  return steps;
}

}  // namespace

double cross_entropy_loss(std::span<const double> scores, std::size_t positive) {
  return log_sum_exp(scores) - scores[positive];
}

double bpr_loss(double positive_score, std::span<const double> negative_scores) {
  if (negative_scores.empty()) throw ValidationError("bpr loss needs a non-empty negative set");
  double total = 0.0;
  for (double s : negative_scores) total -= log_sigmoid(positive_score - s);
  return total / static_cast<double>(negative_scores.size());
}

double top1_loss(double positive_score, std::span<const double> negative_scores) {
  if (negative_scores.empty()) throw ValidationError("top1 loss needs a non-empty negative set");
  double total = 0.0;
  for (double s : negative_scores) total += sigmoid(s - positive_score) + sigmoid(s * s);
  return total / static_cast<double>(negative_scores.size());
}

double evaluate_loss(const RecurrentModel& model, std::span<const StepBatch> window, const HiddenState& initial) {
  const auto steps = run_forward(model, window, initial);
  double loss = 0.0;
  for (const auto& step : steps) loss += step_loss(model.config.loss_kind, step.plan, step.scores, nullptr, nullptr);
  return loss;
}

LossResult loss_and_grad(const RecurrentModel& model, std::span<const StepBatch> window, const HiddenState& initial) {
  const auto& cfg = model.config;
  auto steps = run_forward(model, window, initial);

  LossResult result;
  result.grad = Parameters::zeros(cfg);
  auto& grad = result.grad;

  Eigen::MatrixXd carry_h;  // dL/dh flowing into step t from step t+1
  Eigen::MatrixXd carry_c;
  for (std::size_t t = steps.size(); t-- > 0;) {
    auto& step = steps[t];
    Eigen::MatrixXd d_scores = Eigen::MatrixXd::Zero(step.scores.rows(), step.scores.cols());
    result.loss += step_loss(cfg.loss_kind, step.plan, step.scores, &d_scores, &result.lane_loss_sum);
    result.predictions += step.plan.lanes.size();

    Eigen::MatrixXd d_hidden;
    if (step.plan.columns.empty() && cfg.loss_kind == LossKind::cross_entropy) {
      grad.output_weight.noalias() += step.state.hidden.transpose() * d_scores;
      grad.output_bias += d_scores.colwise().sum().transpose();
      d_hidden = d_scores * model.params.output_weight.transpose();
    } else {
      const Eigen::MatrixXd d_weights = step.state.hidden.transpose() * d_scores;
      const Eigen::RowVectorXd d_bias = d_scores.colwise().sum();
      for (std::size_t k = 0; k < step.plan.columns.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        grad.output_weight.col(step.plan.columns[k] - 1) += d_weights.col(col);
        grad.output_bias(step.plan.columns[k] - 1) += d_bias(col);
      }
      d_hidden = d_scores * step.weights.transpose();
    }
    if (carry_h.size() != 0) d_hidden += carry_h;

    Eigen::MatrixXd d_hidden_prev;
    Eigen::MatrixXd d_cell_prev;
    cell_backward(model.params, cfg.cell_kind, step.cache, d_hidden, carry_c, grad, d_hidden_prev, d_cell_prev);

    // Lanes reset at this step started from a constant zero state.
    const auto& batch = window[t];
    for (std::size_t b = 0; b < batch.size(); ++b) {
      if (!batch[b].reset) continue;
      d_hidden_prev.row(static_cast<Eigen::Index>(b)).setZero();
      if (d_cell_prev.size() != 0) d_cell_prev.row(static_cast<Eigen::Index>(b)).setZero();
    }
    carry_h = std::move(d_hidden_prev);
    carry_c = std::move(d_cell_prev);
  }
  result.final_state = steps.back().state;
  return result;
}

}  // namespace guirec
