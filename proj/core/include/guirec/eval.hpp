#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "guirec/catalog.hpp"
#include "guirec/recommender.hpp"

namespace guirec {

// next_item: the single immediately following action is relevant.
// remaining_items: every later action of the session is relevant.
enum class RelevanceMode { next_item, remaining_items };

struct EvalConfig {
  std::vector<std::size_t> cutoffs{1, 5, 10, 20};
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  RelevanceMode relevance = RelevanceMode::next_item;

  // Throws ConfigError.
  void validate() const;
};

struct SessionSplit {
  SessionLog train;
  SessionLog test;
  std::size_t test_too_short = 0;  // test sessions with fewer than 2 actions
};

// Seeded uniform session-level split: floor(N * ratio) sessions train, the
// rest test. Both sides keep ascending session-ID order and the full catalog.
// Throws ValidationError for fewer than 5 sessions.
SessionSplit split_sessions(const SessionLog& log, const EvalConfig& cfg);

// Single-relevant-item metrics over ranked[0..n). Throws ValidationError when
// the list is shorter than n or its first n entries contain duplicates.
double precision_at_n(std::span<const ActionId> ranked, ActionId relevant, std::size_t n);
double recall_at_n(std::span<const ActionId> ranked, ActionId relevant, std::size_t n);
double mrr_at_n(std::span<const ActionId> ranked, ActionId relevant, std::size_t n);

struct MetricRow {
  std::string model;
  std::size_t cutoff = 0;
  double precision = 0.0;
  double recall = 0.0;
  double mrr = 0.0;
  std::size_t points = 0;   // prediction points evaluated
  std::size_t skipped = 0;  // sessions too short to evaluate
};

struct EvalReport {
  std::vector<MetricRow> rows;

  const MetricRow& row(const std::string& model, std::size_t cutoff) const;
  void append(const EvalReport& other);
};

// Incremental-reveal protocol: for each test session a_1..a_L (L >= 2) and
// t = 1..L-1, the recommender sees a_1..a_t and is scored against a_{t+1}
// (or a_{t+1..L} in remaining_items mode). Metrics are averaged per session,
// then over sessions in session-ID order.
EvalReport sequential_evaluate(const Recommender& recommender, const SessionLog& test, const EvalConfig& cfg);

// CSV: model,cutoff,precision,recall,mrr,points,skipped
void write_report_csv(std::ostream& out, const EvalReport& report);
void print_report_table(std::ostream& out, const EvalReport& report);

}  // namespace guirec
