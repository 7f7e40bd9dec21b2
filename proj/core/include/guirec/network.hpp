#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "guirec/catalog.hpp"

namespace guirec {

enum class CellKind { gru, lstm };
enum class LossKind { cross_entropy, bpr, top1 };

std::string_view to_string(CellKind kind);
std::string_view to_string(LossKind kind);
CellKind parse_cell_kind(std::string_view name);
LossKind parse_loss_kind(std::string_view name);

struct NetworkConfig {
  std::size_t n_actions = 1;
  std::size_t hidden_size = 100;
  CellKind cell_kind = CellKind::gru;
  LossKind loss_kind = LossKind::top1;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  double adagrad_epsilon = 1e-6;
  double init_scale = 0.1;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  // Truncated BPTT window in mini-batch steps; 1 backpropagates through the
  // current step only and carries the hidden state forward as a constant.
  std::size_t bptt_steps = 1;
  // An epoch e >= 2 counts as converged when (L[e-1] - L[e]) / L[e-1] < tolerance.
  double convergence_tolerance = 1e-3;
  bool stop_at_convergence = false;

  // Throws ConfigError.
  void validate() const;
};

// One gate's affine map: input (H x H) applied to the embedding row,
// recurrent (H x H) applied to the previous hidden state, bias (H).
struct GateParams {
  Eigen::MatrixXd input;
  Eigen::MatrixXd recurrent;
  Eigen::VectorXd bias;
};

// GRU gates: update, reset, candidate. LSTM gates: input, forget, output, candidate.
struct Parameters {
  Eigen::MatrixXd embedding;      // n_actions x H; row a-1 embeds action a
  std::vector<GateParams> gates;
  Eigen::MatrixXd output_weight;  // H x n_actions
  Eigen::VectorXd output_bias;    // n_actions

  static Parameters zeros(const NetworkConfig& cfg);

  // Calls f(name, std::span<double>) for every tensor in a fixed order.
  // Spans view the column-major storage.
  template <typename F>
  void for_each_tensor(F&& f);
  template <typename F>
  void for_each_tensor(F&& f) const;

  std::size_t parameter_count() const;
  bool all_finite() const;
};

struct RecurrentModel {
  NetworkConfig config;
  Parameters params;
  Parameters adagrad_accumulator;  // running sum of squared gradients
};

// Number of trainable scalars: 2·A·H + A + G·(2·H² + H), G = 3 (GRU) or 4 (LSTM).
std::size_t parameter_count(const NetworkConfig& cfg);

std::size_t gate_count(CellKind kind);
std::string_view gate_name(CellKind kind, std::size_t gate);

// Weights i.i.d. uniform on [-init_scale, init_scale] drawn in for_each_tensor
// order (embedding, gates, output weight), biases zero.
RecurrentModel init_model(const NetworkConfig& cfg);

// Hidden state of one or more lanes (one row each). `cell` is empty for GRU.
struct HiddenState {
  Eigen::MatrixXd hidden;
  Eigen::MatrixXd cell;

  static HiddenState zeros(CellKind kind, std::size_t lanes, std::size_t hidden_size);
  std::size_t lanes() const { return static_cast<std::size_t>(hidden.rows()); }
};

// Intermediate values of one batched cell step, kept for backpropagation.
struct StepCache {
  std::vector<ActionId> inputs;
  Eigen::MatrixXd x;       // embedding rows, B x H
  Eigen::MatrixXd h_prev;  // B x H
  Eigen::MatrixXd c_prev;  // LSTM only
  std::vector<Eigen::MatrixXd> gates;  // post-activation, B x H each
  Eigen::MatrixXd reset_hidden;  // GRU: r ⊙ h_prev
  Eigen::MatrixXd cell_tanh;     // LSTM: tanh(c)
};

// Advances every lane by one input. Throws std::out_of_range for an action
// outside 1..n_actions.
HiddenState cell_forward(const Parameters& params, CellKind kind, std::span<const ActionId> inputs,
                         const HiddenState& prev, StepCache* cache = nullptr);

// Accumulates parameter gradients of one cell step into `grad` given dL/dh
// (and dL/dc for LSTM) of its outputs; returns dL/dh_prev and dL/dc_prev.
void cell_backward(const Parameters& params, CellKind kind, const StepCache& cache, const Eigen::MatrixXd& d_hidden,
                   const Eigen::MatrixXd& d_cell, Parameters& grad,
                   Eigen::MatrixXd& d_hidden_prev, Eigen::MatrixXd& d_cell_prev);

// Single-lane convenience over cell_forward.
HiddenState cell_step(const RecurrentModel& model, ActionId input, const HiddenState& prev);

// scores = output_weightᵀ h + output_bias for a single-lane state.
Eigen::VectorXd forward_scores(const RecurrentModel& model, const HiddenState& state);

// Max-subtracted softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& scores);

double sigmoid(double x);

template <typename F>
void Parameters::for_each_tensor(F&& f) {
  f(std::string_view("embedding"), std::span<double>(embedding.data(), static_cast<std::size_t>(embedding.size())));
  for (auto& gate : gates) {
    f(std::string_view("gate.input"), std::span<double>(gate.input.data(), static_cast<std::size_t>(gate.input.size())));
    f(std::string_view("gate.recurrent"),
      std::span<double>(gate.recurrent.data(), static_cast<std::size_t>(gate.recurrent.size())));
    f(std::string_view("gate.bias"), std::span<double>(gate.bias.data(), static_cast<std::size_t>(gate.bias.size())));
  }
  f(std::string_view("output_weight"),
    std::span<double>(output_weight.data(), static_cast<std::size_t>(output_weight.size())));
  f(std::string_view("output_bias"), std::span<double>(output_bias.data(), static_cast<std::size_t>(output_bias.size())));
}

template <typename F>
void Parameters::for_each_tensor(F&& f) const {
  const_cast<Parameters*>(this)->for_each_tensor(
      [&](std::string_view name, std::span<double> values) { f(name, std::span<const double>(values)); });
}

}  // namespace guirec
