#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "guirec/eval.hpp"
#include "guirec/gui_model.hpp"
#include "guirec/simulator.hpp"
#include "guirec/synth.hpp"
#include "guirec/train.hpp"

namespace guirec {

struct ReplicateConfig {
  std::uint64_t seed = 0;

  std::size_t synthetic_sessions = 3476;
  std::size_t catalog_size = 522;
  std::size_t motif_min_len = 2;
  std::size_t motif_max_len = 8;
  std::size_t motif_min_support = 3;

  std::size_t hidden_size = 100;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 25;
  double learning_rate = 0.1;
  double convergence_tolerance = 1e-3;

  std::vector<std::size_t> cutoffs{1, 5, 10, 20};
  double split_ratio = 0.8;

  std::size_t episodes = 100;
  std::size_t episode_steps = 30;
  std::size_t top_k = 10;
  double epsilon = 0.1;

  void validate() const;
};

// Seed streams derived from the master seed.
enum class ReplicateStream : std::uint64_t {
  synth = 0,
  split = 1,
  gru_top1 = 2,
  gru_bpr = 3,
  gru_ce = 4,
  lstm_ce = 5,
  episodes = 6,
};

std::uint64_t replicate_seed(const ReplicateConfig& cfg, ReplicateStream stream);

struct DatasetSummary {
  std::size_t scripted_sessions = 0;
  std::size_t synthetic_sessions = 0;
  std::size_t total_sessions = 0;
  std::size_t total_actions = 0;
  std::size_t catalog_size = 0;
  std::size_t distinct_actions = 0;  // IDs that occur in some session
  double mean_length = 0.0;
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  std::size_t motifs = 0;
  double scripted_top5_share = 0.0;  // events covered by the 5 most frequent scripted IDs
};

DatasetSummary summarize_dataset(const SessionLog& scripted, const SessionLog& corpus, std::size_t motifs);

// Share of all events taken by the `k` most frequent action IDs.
double top_k_share(const SessionLog& log, std::size_t k);

struct TrainedVariant {
  std::string label;
  TrainResult result;
};

struct ReplicateResult {
  ReplicateConfig config;
  GuiModel gui;
  SessionLog scripted;
  SessionLog corpus;  // scripted followed by synthetic sessions
  DatasetSummary dataset;
  SessionSplit split;
  std::vector<TrainedVariant> variants;
  EvalReport report;
  std::string best_model;      // highest MRR at the largest cutoff among recurrent models
  std::string guided_model;    // best GRU variant, drives the guided generator
  double best_mrr1 = 0.0;
  double knn_mrr1 = 0.0;
  std::optional<double> improvement_pct;  // (best - knn) / knn · 100
  std::vector<EpisodeStats> monkey_episodes;
  std::vector<EpisodeStats> guided_episodes;
  EpisodeSummary monkey;
  EpisodeSummary guided;
};

using LogSink = std::function<void(std::string_view)>;

// The full experiment over the bundled mini-hub model: scripted sessions,
// synthetic augmentation, four recurrent variants plus the kNN baseline,
// sequential evaluation and the monkey-versus-guided generator comparison.
ReplicateResult run_replicate(const ReplicateConfig& cfg, const LogSink& log = {});

// Writes every report file into `dir` (created if needed) and returns the
// paths written, in a fixed order. Contents depend only on the result.
std::vector<std::filesystem::path> write_replicate_reports(const ReplicateResult& result,
                                                           const std::filesystem::path& dir);

void write_loss_trace_csv(std::ostream& out, const std::vector<TrainedVariant>& variants);
void write_dataset_csv(std::ostream& out, const DatasetSummary& dataset);
void write_replicate_summary(std::ostream& out, const ReplicateResult& result);

}  // namespace guirec
