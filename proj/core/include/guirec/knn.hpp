#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "guirec/catalog.hpp"
#include "guirec/recommender.hpp"

namespace guirec {

enum class DiagonalPolicy { unit, zero };

// Dense symmetric item-to-item similarity over action IDs 1..n_actions().
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n_actions) : n_(n_actions), values_(n_actions * n_actions, 0.0) {}

  std::size_t n_actions() const noexcept { return n_; }

  double operator()(ActionId i, ActionId j) const { return values_[index(i, j)]; }
  double& at(ActionId i, ActionId j) { return values_[index(i, j)]; }

  // Similarities of `action` to actions 1..n (element k is action k + 1).
  std::span<const double> row(ActionId action) const;

 private:
  std::size_t index(ActionId i, ActionId j) const;

  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Cosine similarity of binary session-incidence vectors:
// |S(i) ∩ S(j)| / sqrt(|S(i)| |S(j)|), zero when either action never occurs.
SimilarityMatrix fit_knn(const SessionLog& log, DiagonalPolicy diagonal = DiagonalPolicy::unit);

// Top-n actions most similar to `current_action`, self excluded, ties by
// ascending ID. Always n entries (when the catalog allows): zero-score actions
// pad the list in ascending ID order. Throws std::out_of_range for an unknown
// action.
RankedList knn_recommend(const SimilarityMatrix& matrix, ActionId current_action, std::size_t n);

// Upper-triangle dump, `i,j,score`, non-zero entries with i < j only.
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix);

// Item-to-item baseline: recommends from the latest observed action only.
class KnnRecommender final : public Recommender {
 public:
  explicit KnnRecommender(SimilarityMatrix matrix) : matrix_(std::move(matrix)) {}

  std::string name() const override { return "knn"; }
  std::size_t n_actions() const override { return matrix_.n_actions(); }
  std::unique_ptr<RecommenderCursor> start_session() const override;

  const SimilarityMatrix& matrix() const noexcept { return matrix_; }

 private:
  SimilarityMatrix matrix_;
};

}  // namespace guirec
