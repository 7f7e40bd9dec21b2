#include "guirec/recommender.hpp"

#include <algorithm>
#include <numeric>

#include "guirec/errors.hpp"

namespace guirec {

RankedList top_n(std::span<const double> scores, std::size_t n, std::optional<ActionId> exclude) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (exclude && *exclude >= 1 && *exclude <= scores.size()) {
    order.erase(order.begin() + (*exclude - 1));
  }
  const std::size_t count = std::min(n, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), better);
  RankedList ranked;
  ranked.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ranked.push_back({static_cast<ActionId>(order[i] + 1), scores[order[i]]});
  }
  return ranked;
}

RankedList Recommender::recommend(std::span<const ActionId> prefix, std::size_t n) const {
  if (prefix.empty()) throw ValidationError("recommend: prefix must be non-empty");
  auto cursor = start_session();
  for (ActionId id : prefix) cursor->observe(id);
  return cursor->rank(n);
}

}  // namespace guirec
