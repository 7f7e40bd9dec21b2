#include "guirec/knn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "guirec/errors.hpp"

namespace guirec {

std::size_t SimilarityMatrix::index(ActionId i, ActionId j) const {
  if (i < 1 || j < 1 || i > n_ || j > n_) {
    throw std::out_of_range("similarity index (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside 1.." + std::to_string(n_));
  }
  return static_cast<std::size_t>(i - 1) * n_ + (j - 1);
}

std::span<const double> SimilarityMatrix::row(ActionId action) const {
  return std::span<const double>(values_).subspan(index(action, 1), n_);
}

SimilarityMatrix fit_knn(const SessionLog& log, DiagonalPolicy diagonal) {
  if (log.sessions.empty()) throw ValidationError("fit_knn needs at least one session");
  const std::size_t n = log.catalog.size();
  std::vector<std::size_t> occurrences(n, 0);
  std::vector<std::size_t> co(n * n, 0);

  std::vector<ActionId> distinct;
  for (const auto& session : log.sessions) {
    distinct.assign(session.action_ids.begin(), session.action_ids.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t a = 0; a < distinct.size(); ++a) {
      const std::size_t i = distinct[a] - 1;
      ++occurrences[i];
      for (std::size_t b = a + 1; b < distinct.size(); ++b) ++co[i * n + (distinct[b] - 1)];
    }
  }

  SimilarityMatrix matrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (occurrences[i] == 0) continue;
    if (diagonal == DiagonalPolicy::unit) matrix.at(static_cast<ActionId>(i + 1), static_cast<ActionId>(i + 1)) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (co[i * n + j] == 0) continue;
      const double sim = static_cast<double>(co[i * n + j]) /
                         std::sqrt(static_cast<double>(occurrences[i]) * static_cast<double>(occurrences[j]));
      matrix.at(static_cast<ActionId>(i + 1), static_cast<ActionId>(j + 1)) = sim;
      matrix.at(static_cast<ActionId>(j + 1), static_cast<ActionId>(i + 1)) = sim;
    }
  }
  return matrix;
}

RankedList knn_recommend(const SimilarityMatrix& matrix, ActionId current_action, std::size_t n) {
  if (n == 0) return {};
  return top_n(matrix.row(current_action), n, current_action);
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix) {
  out << "i,j,score\n";
  char buffer[32];
  const auto n = static_cast<ActionId>(matrix.n_actions());
  for (ActionId i = 1; i <= n; ++i) {
    for (ActionId j = i + 1; j <= n; ++j) {
      const double s = matrix(i, j);
      if (s == 0.0) continue;
      std::snprintf(buffer, sizeof buffer, "%.17g", s);
      out << i << ',' << j << ',' << buffer << '\n';
    }
  }
}

namespace {

class KnnCursor final : public RecommenderCursor {
 public:
  explicit KnnCursor(const SimilarityMatrix& matrix) : matrix_(matrix) {}

  void observe(ActionId action) override {
    if (action < 1 || action > matrix_.n_actions()) {
      throw std::out_of_range("action " + std::to_string(action) + " outside kNN vocabulary");
    }
    last_ = action;
  }

  RankedList rank(std::size_t n) const override {
    if (last_ == 0) {
      const std::vector<double> zeros(matrix_.n_actions(), 0.0);
      return top_n(zeros, n);
    }
    return knn_recommend(matrix_, last_, n);
  }

 private:
  const SimilarityMatrix& matrix_;
  ActionId last_ = 0;
};

}  // namespace

std::unique_ptr<RecommenderCursor> KnnRecommender::start_session() const {
  return std::make_unique<KnnCursor>(matrix_);
}

}  // namespace guirec
