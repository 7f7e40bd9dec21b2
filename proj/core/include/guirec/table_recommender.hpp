#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>

#include "guirec/recommender.hpp"

namespace guirec {

// First-order transition table: scores successors of the latest action by
// stored weight. Serves as a transparent stub model (on a corpus where each
// action has a single successor it is a perfect next-action oracle).
//
// Text format:
//   guirec-table 1
//   n_actions <N>
//   <previous> <next> <weight>      one line per transition
class TransitionTable final : public Recommender {
 public:
  TransitionTable(std::size_t n_actions, std::string name = "table");

  void set(ActionId previous, ActionId next, double weight);
  double weight(ActionId previous, ActionId next) const;

  std::string name() const override { return name_; }
  std::size_t n_actions() const override { return n_actions_; }
  std::unique_ptr<RecommenderCursor> start_session() const override;

  std::vector<double> scores_after(ActionId previous) const;

 private:
  std::size_t n_actions_;
  std::string name_;
  std::map<std::pair<ActionId, ActionId>, double> weights_;
};

// Transition counts over consecutive action pairs of every session.
TransitionTable fit_transition_table(const SessionLog& log);

void save_table(std::ostream& out, const TransitionTable& table);
TransitionTable load_table(std::istream& in, std::string name = "table");
bool is_table_stream(std::istream& in);

}  // namespace guirec
