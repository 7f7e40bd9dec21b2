#include "guirec/rnn_recommender.hpp"

#include "guirec/errors.hpp"

namespace guirec {

RnnRecommender::RnnRecommender(std::shared_ptr<const RecurrentModel> model, std::string name)
    : model_(std::move(model)), name_(std::move(name)) {}

std::unique_ptr<RecommenderCursor> RnnRecommender::start_session() const {
  return std::make_unique<RnnCursor>(*model_);
}

RnnCursor::RnnCursor(const RecurrentModel& model)
    : model_(model), state_(HiddenState::zeros(model.config.cell_kind, 1, model.config.hidden_size)) {}

void RnnCursor::observe(ActionId action) { state_ = cell_step(model_, action, state_); }

Eigen::VectorXd RnnCursor::probabilities() const { return softmax(forward_scores(model_, state_)); }

RankedList RnnCursor::rank(std::size_t n) const {
  const Eigen::VectorXd p = probabilities();
  return top_n(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), n);
}

RankedList recommend_next(const RecurrentModel& model, std::span<const ActionId> prefix, std::size_t n) {
  if (prefix.empty()) throw ValidationError("recommend_next: prefix must be non-empty");
  RnnCursor cursor(model);
  for (ActionId a : prefix) cursor.observe(a);
  return cursor.rank(n);
}

std::string model_label(const NetworkConfig& cfg) {
  return std::string(to_string(cfg.cell_kind)) + "-" + std::string(to_string(cfg.loss_kind));
}

}  // namespace guirec
