#pragma once

#include <memory>
#include <span>
#include <string>

#include "guirec/network.hpp"
#include "guirec/recommender.hpp"

namespace guirec {

// Next-action recommender over a trained recurrent model. Cursors run the
// cell from a zero hidden state; before any observation they rank by the
// output layer at the zero state.
class RnnRecommender final : public Recommender {
 public:
  RnnRecommender(std::shared_ptr<const RecurrentModel> model, std::string name);

  std::string name() const override { return name_; }
  std::size_t n_actions() const override { return model_->config.n_actions; }
  std::unique_ptr<RecommenderCursor> start_session() const override;

  const RecurrentModel& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const RecurrentModel> model_;
  std::string name_;
};

// Stateful single-session inference; owns its hidden state.
class RnnCursor final : public RecommenderCursor {
 public:
  explicit RnnCursor(const RecurrentModel& model);

  void observe(ActionId action) override;
  RankedList rank(std::size_t n) const override;

  // Softmax over all actions for the current state.
  Eigen::VectorXd probabilities() const;
  const HiddenState& state() const noexcept { return state_; }

 private:
  const RecurrentModel& model_;
  HiddenState state_;
};

// Runs the cell over `prefix` from zeros and returns the top-n actions by
// probability, ties by ascending ID. Throws ValidationError on an empty
// prefix and std::out_of_range on an unknown action.
RankedList recommend_next(const RecurrentModel& model, std::span<const ActionId> prefix, std::size_t n);

// Default display name, e.g. "gru-top1".
std::string model_label(const NetworkConfig& cfg);

}  // namespace guirec
