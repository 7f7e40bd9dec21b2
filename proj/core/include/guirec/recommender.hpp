#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "guirec/catalog.hpp"

namespace guirec {

struct ScoredAction {
  ActionId action = 0;
  double score = 0.0;

  bool operator==(const ScoredAction&) const = default;
};

using RankedList = std::vector<ScoredAction>;

// Top-n entries of `scores`, where scores[i] belongs to action i + 1. Sorted
// by descending score, ties by ascending action ID. `exclude` is skipped.
RankedList top_n(std::span<const double> scores, std::size_t n, std::optional<ActionId> exclude = std::nullopt);

// Per-session recommendation state, owned by the caller.
class RecommenderCursor {
 public:
  virtual ~RecommenderCursor() = default;

  // Reveals the next action of the session.
  virtual void observe(ActionId action) = 0;

  // Ranking of candidate next actions given everything observed so far.
  virtual RankedList rank(std::size_t n) const = 0;
};

// A fitted, immutable next-action recommender. Safe to share across threads;
// each session gets its own cursor.
class Recommender {
 public:
  virtual ~Recommender() = default;

  virtual std::string name() const = 0;
  virtual std::size_t n_actions() const = 0;
  virtual std::unique_ptr<RecommenderCursor> start_session() const = 0;

  // Feeds `prefix` to a fresh cursor and ranks the next action.
  RankedList recommend(std::span<const ActionId> prefix, std::size_t n) const;
};

}  // namespace guirec
