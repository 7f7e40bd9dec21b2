#include "guirec/network.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "guirec/errors.hpp"
#include "guirec/rng.hpp"

namespace guirec {

namespace {

constexpr std::array<std::string_view, 2> kCellNames = {"gru", "lstm"};
constexpr std::array<std::string_view, 3> kLossNames = {"cross_entropy", "bpr", "top1"};

// GRU gate slots.
constexpr std::size_t kUpdate = 0;
constexpr std::size_t kReset = 1;
constexpr std::size_t kGruCandidate = 2;
// LSTM gate slots.
constexpr std::size_t kInput = 0;
constexpr std::size_t kForget = 1;
constexpr std::size_t kOutput = 2;
constexpr std::size_t kLstmCandidate = 3;

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& a) {
  return a.unaryExpr([](double v) { return guirec::sigmoid(v); });
}

Eigen::MatrixXd affine(const GateParams& gate, const Eigen::MatrixXd& x, const Eigen::MatrixXd& h) {
  Eigen::MatrixXd a = x * gate.input.transpose();
  a.noalias() += h * gate.recurrent.transpose();
  a.rowwise() += gate.bias.transpose();
  return a;
}

void accumulate_gate(const GateParams& gate, GateParams& grad, const Eigen::MatrixXd& d_pre, const Eigen::MatrixXd& x,
                     const Eigen::MatrixXd& h, Eigen::MatrixXd& d_x, Eigen::MatrixXd& d_h) {
  grad.input.noalias() += d_pre.transpose() * x;
  grad.recurrent.noalias() += d_pre.transpose() * h;
  grad.bias += d_pre.colwise().sum().transpose();
  d_x.noalias() += d_pre * gate.input;
  d_h.noalias() += d_pre * gate.recurrent;
}

}  // namespace

std::string_view to_string(CellKind kind) { return kCellNames.at(static_cast<std::size_t>(kind)); }
std::string_view to_string(LossKind kind) { return kLossNames.at(static_cast<std::size_t>(kind)); }

CellKind parse_cell_kind(std::string_view name) {
  for (std::size_t i = 0; i < kCellNames.size(); ++i) {
    if (kCellNames[i] == name) return static_cast<CellKind>(i);
  }
  throw ConfigError("unknown cell kind '" + std::string(name) + "' (expected gru or lstm)");
}

LossKind parse_loss_kind(std::string_view name) {
  for (std::size_t i = 0; i < kLossNames.size(); ++i) {
    if (kLossNames[i] == name) return static_cast<LossKind>(i);
  }
  throw ConfigError("unknown loss kind '" + std::string(name) + "' (expected cross_entropy, bpr or top1)");
}

void NetworkConfig::validate() const {
  if (n_actions < 1) throw ConfigError("n_actions must be >= 1");
  if (hidden_size < 1) throw ConfigError("hidden_size must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (bptt_steps < 1) throw ConfigError("bptt_steps must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(adagrad_epsilon > 0.0)) throw ConfigError("adagrad_epsilon must be > 0");
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be >= 0");
  if (!(convergence_tolerance >= 0.0)) throw ConfigError("convergence_tolerance must be >= 0");
}

std::size_t gate_count(CellKind kind) { return kind == CellKind::gru ? 3 : 4; }

std::string_view gate_name(CellKind kind, std::size_t gate) {
  static constexpr std::array<std::string_view, 3> gru = {"update", "reset", "candidate"};
  static constexpr std::array<std::string_view, 4> lstm = {"input", "forget", "output", "candidate"};
  return kind == CellKind::gru ? gru.at(gate) : lstm.at(gate);
}

std::size_t parameter_count(const NetworkConfig& cfg) {
  const std::size_t a = cfg.n_actions;
  const std::size_t h = cfg.hidden_size;
  return 2 * a * h + a + gate_count(cfg.cell_kind) * (2 * h * h + h);
}

Parameters Parameters::zeros(const NetworkConfig& cfg) {
  const auto a = static_cast<Eigen::Index>(cfg.n_actions);
  const auto h = static_cast<Eigen::Index>(cfg.hidden_size);
  Parameters p;
  p.embedding = Eigen::MatrixXd::Zero(a, h);
  p.gates.resize(gate_count(cfg.cell_kind));
  for (auto& gate : p.gates) {
    gate.input = Eigen::MatrixXd::Zero(h, h);
    gate.recurrent = Eigen::MatrixXd::Zero(h, h);
    gate.bias = Eigen::VectorXd::Zero(h);
  }
  p.output_weight = Eigen::MatrixXd::Zero(h, a);
  p.output_bias = Eigen::VectorXd::Zero(a);
  return p;
}

std::size_t Parameters::parameter_count() const {
  std::size_t total = 0;
  for_each_tensor([&](std::string_view, std::span<const double> v) { total += v.size(); });
  return total;
}

bool Parameters::all_finite() const {
  bool finite = true;
  for_each_tensor([&](std::string_view, std::span<const double> v) {
    for (double x : v) finite = finite && std::isfinite(x);
  });
  return finite;
}

RecurrentModel init_model(const NetworkConfig& cfg) {
  cfg.validate();
  RecurrentModel model{cfg, Parameters::zeros(cfg), Parameters::zeros(cfg)};
  Rng rng(cfg.seed);
  const double scale = cfg.init_scale;
  model.params.for_each_tensor([&](std::string_view name, std::span<double> values) {
    if (name.ends_with("bias")) return;
    for (double& v : values) v = (2.0 * rng.uniform01() - 1.0) * scale;
  });
  return model;
}

HiddenState HiddenState::zeros(CellKind kind, std::size_t lanes, std::size_t hidden_size) {
  HiddenState s;
  s.hidden = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lanes), static_cast<Eigen::Index>(hidden_size));
  if (kind == CellKind::lstm) s.cell = s.hidden;
  return s;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

HiddenState cell_forward(const Parameters& params, CellKind kind, std::span<const ActionId> inputs,
                         const HiddenState& prev, StepCache* cache) {
  const auto lanes = static_cast<Eigen::Index>(inputs.size());
  const auto n_actions = static_cast<std::size_t>(params.embedding.rows());
  if (prev.hidden.rows() != lanes) throw std::invalid_argument("cell_forward: hidden state lane count mismatch");

  Eigen::MatrixXd x(lanes, params.embedding.cols());
  for (Eigen::Index b = 0; b < lanes; ++b) {
    const ActionId a = inputs[static_cast<std::size_t>(b)];
    if (a < 1 || a > n_actions) {
      throw std::out_of_range("action " + std::to_string(a) + " outside 1.." + std::to_string(n_actions));
    }
    x.row(b) = params.embedding.row(a - 1);
  }

  HiddenState next;
  std::vector<Eigen::MatrixXd> gates;
  Eigen::MatrixXd reset_hidden;
  Eigen::MatrixXd cell_tanh;

  if (kind == CellKind::gru) {
    const auto& h = prev.hidden;
    Eigen::MatrixXd z = sigmoid(affine(params.gates[kUpdate], x, h));
    Eigen::MatrixXd r = sigmoid(affine(params.gates[kReset], x, h));
    reset_hidden = r.cwiseProduct(h);
    Eigen::MatrixXd candidate = affine(params.gates[kGruCandidate], x, reset_hidden).array().tanh().matrix();
    next.hidden = h + z.cwiseProduct(candidate - h);
    gates = {std::move(z), std::move(r), std::move(candidate)};
  } else {
    const auto& h = prev.hidden;
    Eigen::MatrixXd i = sigmoid(affine(params.gates[kInput], x, h));
    Eigen::MatrixXd f = sigmoid(affine(params.gates[kForget], x, h));
    Eigen::MatrixXd o = sigmoid(affine(params.gates[kOutput], x, h));
    Eigen::MatrixXd g = affine(params.gates[kLstmCandidate], x, h).array().tanh().matrix();
    next.cell = f.cwiseProduct(prev.cell) + i.cwiseProduct(g);
    cell_tanh = next.cell.array().tanh().matrix();
    next.hidden = o.cwiseProduct(cell_tanh);
    gates = {std::move(i), std::move(f), std::move(o), std::move(g)};
  }

  if (cache) {
    cache->inputs.assign(inputs.begin(), inputs.end());
    cache->x = std::move(x);
    cache->h_prev = prev.hidden;
    cache->c_prev = prev.cell;
    cache->gates = std::move(gates);
    cache->reset_hidden = std::move(reset_hidden);
    cache->cell_tanh = std::move(cell_tanh);
  }
  return next;
}

void cell_backward(const Parameters& params, CellKind kind, const StepCache& cache, const Eigen::MatrixXd& d_hidden,
                   const Eigen::MatrixXd& d_cell, Parameters& grad, Eigen::MatrixXd& d_hidden_prev,
                   Eigen::MatrixXd& d_cell_prev) {
  const auto& x = cache.x;
  const auto& h = cache.h_prev;
  Eigen::MatrixXd d_x = Eigen::MatrixXd::Zero(x.rows(), x.cols());

  if (kind == CellKind::gru) {
    const auto& z = cache.gates[kUpdate];
    const auto& r = cache.gates[kReset];
    const auto& candidate = cache.gates[kGruCandidate];

    d_hidden_prev = d_hidden.cwiseProduct((1.0 - z.array()).matrix());
    const Eigen::MatrixXd d_z = d_hidden.cwiseProduct(candidate - h);
    const Eigen::MatrixXd d_candidate = d_hidden.cwiseProduct(z);

    const Eigen::MatrixXd d_pre_candidate = (d_candidate.array() * (1.0 - candidate.array().square())).matrix();
    Eigen::MatrixXd d_reset_hidden = Eigen::MatrixXd::Zero(h.rows(), h.cols());
    accumulate_gate(params.gates[kGruCandidate], grad.gates[kGruCandidate], d_pre_candidate, x, cache.reset_hidden,
                    d_x, d_reset_hidden);
    d_hidden_prev += d_reset_hidden.cwiseProduct(r);
    const Eigen::MatrixXd d_r = d_reset_hidden.cwiseProduct(h);

    const Eigen::MatrixXd d_pre_reset = (d_r.array() * r.array() * (1.0 - r.array())).matrix();
    accumulate_gate(params.gates[kReset], grad.gates[kReset], d_pre_reset, x, h, d_x, d_hidden_prev);
    const Eigen::MatrixXd d_pre_update = (d_z.array() * z.array() * (1.0 - z.array())).matrix();
    accumulate_gate(params.gates[kUpdate], grad.gates[kUpdate], d_pre_update, x, h, d_x, d_hidden_prev);
    d_cell_prev.resize(0, 0);
  } else {
    const auto& i = cache.gates[kInput];
    const auto& f = cache.gates[kForget];
    const auto& o = cache.gates[kOutput];
    const auto& g = cache.gates[kLstmCandidate];
    const auto& t = cache.cell_tanh;

    Eigen::MatrixXd d_c = (d_hidden.array() * o.array() * (1.0 - t.array().square())).matrix();
    if (d_cell.size() != 0) d_c += d_cell;
    const Eigen::MatrixXd d_o = d_hidden.cwiseProduct(t);
    const Eigen::MatrixXd d_i = d_c.cwiseProduct(g);
    const Eigen::MatrixXd d_g = d_c.cwiseProduct(i);
    const Eigen::MatrixXd d_f = d_c.cwiseProduct(cache.c_prev);
    d_cell_prev = d_c.cwiseProduct(f);

    d_hidden_prev = Eigen::MatrixXd::Zero(h.rows(), h.cols());
    auto sigmoid_grad = [](const Eigen::MatrixXd& d, const Eigen::MatrixXd& s) {
      return (d.array() * s.array() * (1.0 - s.array())).matrix().eval();
    };
    accumulate_gate(params.gates[kInput], grad.gates[kInput], sigmoid_grad(d_i, i), x, h, d_x, d_hidden_prev);
    accumulate_gate(params.gates[kForget], grad.gates[kForget], sigmoid_grad(d_f, f), x, h, d_x, d_hidden_prev);
    accumulate_gate(params.gates[kOutput], grad.gates[kOutput], sigmoid_grad(d_o, o), x, h, d_x, d_hidden_prev);
    const Eigen::MatrixXd d_pre_g = (d_g.array() * (1.0 - g.array().square())).matrix();
    accumulate_gate(params.gates[kLstmCandidate], grad.gates[kLstmCandidate], d_pre_g, x, h, d_x, d_hidden_prev);
  }

  for (Eigen::Index b = 0; b < x.rows(); ++b) {
    grad.embedding.row(cache.inputs[static_cast<std::size_t>(b)] - 1) += d_x.row(b);
  }
}

HiddenState cell_step(const RecurrentModel& model, ActionId input, const HiddenState& prev) {
  const ActionId inputs[] = {input};
  return cell_forward(model.params, model.config.cell_kind, inputs, prev);
}

Eigen::VectorXd forward_scores(const RecurrentModel& model, const HiddenState& state) {
  return model.params.output_weight.transpose() * state.hidden.row(0).transpose() + model.params.output_bias;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
  const double max = scores.maxCoeff();
  Eigen::VectorXd e = (scores.array() - max).exp().matrix();
  return e / e.sum();
}

}  // namespace guirec
