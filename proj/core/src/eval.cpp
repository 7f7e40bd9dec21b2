#include "guirec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include "guirec/errors.hpp"
#include "guirec/rng.hpp"

namespace guirec {

void EvalConfig::validate() const {
  if (cutoffs.empty()) throw ConfigError("at least one cutoff is required");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1) throw ConfigError("cutoffs must be >= 1");
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) throw ConfigError("cutoffs must be strictly increasing");
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must lie in (0, 1)");
}

SessionSplit split_sessions(const SessionLog& log, const EvalConfig& cfg) {
  cfg.validate();
  const std::size_t n = log.sessions.size();
  if (n < 5) throw ValidationError("split_sessions needs at least 5 sessions");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_index(i + 1)]);

  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.split_ratio));
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  SessionSplit split;
  split.train.catalog = log.catalog;
  split.test.catalog = log.catalog;
  for (auto i : train_idx) split.train.sessions.push_back(log.sessions[i]);
  for (auto i : test_idx) {
    split.test.sessions.push_back(log.sessions[i]);
    if (log.sessions[i].action_ids.size() < 2) ++split.test_too_short;
  }
  return split;
}

namespace {

// 1-based rank of `relevant` within ranked[0..n), 0 when absent.
std::size_t rank_of(std::span<const ActionId> ranked, ActionId relevant, std::size_t n) {
  if (ranked.size() < n) {
    throw ValidationError("ranked list has " + std::to_string(ranked.size()) + " entries, cutoff " +
                          std::to_string(n));
  }
  std::vector<ActionId> head(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(head.begin(), head.end());
  if (std::adjacent_find(head.begin(), head.end()) != head.end()) {
    throw ValidationError("ranked list contains duplicate actions");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked[i] == relevant) return i + 1;
  }
  return 0;
}

}  // namespace

double precision_at_n(std::span<const ActionId> ranked, ActionId relevant, std::size_t n) {
  return rank_of(ranked, relevant, n) ? 1.0 / static_cast<double>(n) : 0.0;
}

double recall_at_n(std::span<const ActionId> ranked, ActionId relevant, std::size_t n) {
  return rank_of(ranked, relevant, n) ? 1.0 : 0.0;
}

double mrr_at_n(std::span<const ActionId> ranked, ActionId relevant, std::size_t n) {
  const auto rank = rank_of(ranked, relevant, n);
  return rank ? 1.0 / static_cast<double>(rank) : 0.0;
}

const MetricRow& EvalReport::row(const std::string& model, std::size_t cutoff) const {
  for (const auto& r : rows) {
    if (r.model == model && r.cutoff == cutoff) return r;
  }
  throw std::out_of_range("no report row for model '" + model + "' at cutoff " + std::to_string(cutoff));
}

void EvalReport::append(const EvalReport& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }

EvalReport sequential_evaluate(const Recommender& recommender, const SessionLog& test, const EvalConfig& cfg) {
  cfg.validate();
  const std::size_t k = cfg.cutoffs.size();
  const std::size_t list_len = cfg.cutoffs.back();

  std::vector<double> precision(k, 0.0), recall(k, 0.0), mrr(k, 0.0);
  std::size_t sessions = 0;
  std::size_t points = 0;
  std::size_t skipped = 0;

  std::vector<ActionId> ranked;
  std::vector<double> sp(k), sr(k), sm(k);
  for (const auto& session : test.sessions) {
    const auto& ids = session.action_ids;
    if (ids.size() < 2) {
      ++skipped;
      continue;
    }
    std::fill(sp.begin(), sp.end(), 0.0);
    std::fill(sr.begin(), sr.end(), 0.0);
    std::fill(sm.begin(), sm.end(), 0.0);

    auto cursor = recommender.start_session();
    for (std::size_t t = 0; t + 1 < ids.size(); ++t) {
      cursor->observe(ids[t]);
      const auto list = cursor->rank(list_len);
      ranked.clear();
      for (const auto& entry : list) ranked.push_back(entry.action);

      if (cfg.relevance == RelevanceMode::next_item) {
        const ActionId relevant = ids[t + 1];
        for (std::size_t c = 0; c < k; ++c) {
          const auto n = cfg.cutoffs[c];
          sp[c] += precision_at_n(ranked, relevant, n);
          sr[c] += recall_at_n(ranked, relevant, n);
          sm[c] += mrr_at_n(ranked, relevant, n);
        }
      } else {
        const std::set<ActionId> relevant(ids.begin() + static_cast<std::ptrdiff_t>(t + 1), ids.end());
        for (std::size_t c = 0; c < k; ++c) {
          const auto n = cfg.cutoffs[c];
          (void)rank_of(ranked, 0, n);
          std::size_t hits = 0;
          std::size_t first = 0;
          for (std::size_t i = 0; i < n; ++i) {
            if (relevant.count(ranked[i])) {
              ++hits;
              if (!first) first = i + 1;
            }
          }
          sp[c] += static_cast<double>(hits) / static_cast<double>(n);
          sr[c] += static_cast<double>(hits) / static_cast<double>(relevant.size());
          sm[c] += first ? 1.0 / static_cast<double>(first) : 0.0;
        }
      }
    }
    const double steps = static_cast<double>(ids.size() - 1);
    for (std::size_t c = 0; c < k; ++c) {
      precision[c] += sp[c] / steps;
      recall[c] += sr[c] / steps;
      mrr[c] += sm[c] / steps;
    }
    ++sessions;
    points += ids.size() - 1;
  }

  EvalReport report;
  for (std::size_t c = 0; c < k; ++c) {
    MetricRow row;
    row.model = recommender.name();
    row.cutoff = cfg.cutoffs[c];
    if (sessions) {
      row.precision = precision[c] / static_cast<double>(sessions);
      row.recall = recall[c] / static_cast<double>(sessions);
      row.mrr = mrr[c] / static_cast<double>(sessions);
    }
    row.points = points;
    row.skipped = skipped;
    report.rows.push_back(row);
  }
  return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "model,cutoff,precision,recall,mrr,points,skipped\n";
  char buffer[128];
  for (const auto& r : report.rows) {
    std::snprintf(buffer, sizeof buffer, "%zu,%.6f,%.6f,%.6f,%zu,%zu", r.cutoff, r.precision, r.recall, r.mrr,
                  r.points, r.skipped);
    out << r.model << ',' << buffer << '\n';
  }
}

void print_report_table(std::ostream& out, const EvalReport& report) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, "%-20s %6s %10s %10s %10s %8s\n", "model", "cutoff", "precision", "recall",
                "mrr", "points");
  out << buffer;
  for (const auto& r : report.rows) {
    std::snprintf(buffer, sizeof buffer, "%-20s %6zu %10.4f %10.4f %10.4f %8zu\n", r.model.c_str(), r.cutoff,
                  r.precision, r.recall, r.mrr, r.points);
    out << buffer;
  }
}

}  // namespace guirec
