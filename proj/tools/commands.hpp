#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "guirec/replicate.hpp"

namespace guirec {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ReplicateConfig, seed, synthetic_sessions, catalog_size,
                                                motif_min_len, motif_max_len, motif_min_support, hidden_size,
                                                batch_size, max_epochs, learning_rate, convergence_tolerance, cutoffs,
                                                split_ratio, episodes, episode_steps, top_k, epsilon)

}  // namespace guirec

namespace guirec::cli {

// Every subcommand's options are a plain struct. The same struct is filled
// from flags, serialised into manifest.json and read back by `replay`.

struct IngestOptions {
  std::string events;
  std::string seed_catalog;  // optional
  std::string out_dir = ".";
};

struct SynthOptions {
  std::string sessions;
  std::string catalog;
  std::string out_dir = ".";
  std::size_t n_sessions = 100;
  std::size_t length_min = 1;
  std::size_t length_max = 49;
  double core_weight = 0.0;
  std::size_t core_min = 4;
  std::size_t core_max = 19;
  double motif_rate = 0.8;
  double noise_rate = 0.05;
  std::size_t motif_min_len = 2;
  std::size_t motif_max_len = 8;
  std::size_t motif_min_support = 3;
  std::size_t pad_catalog = 0;  // grow the catalog to this size first; 0 keeps it
  std::uint64_t seed = 0;
};

struct TrainOptions {
  std::string sessions;
  std::string catalog;
  std::string out_dir = ".";
  std::string model_name = "model.bin";
  std::string cell = "gru";
  std::string loss = "top1";
  std::size_t hidden_size = 100;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  double adagrad_epsilon = 1e-6;
  double init_scale = 0.1;
  std::size_t epochs = 10;
  std::size_t bptt_steps = 1;
  double convergence_tolerance = 1e-3;
  bool stop_at_convergence = false;
  std::uint64_t seed = 0;
  bool no_split = false;
  double split_ratio = 0.8;
  std::uint64_t split_seed = 0;
};

struct EvalOptions {
  std::vector<std::string> models;
  std::string sessions;
  std::string catalog;
  std::string out_dir = ".";
  std::vector<std::size_t> cutoffs{1, 5, 10, 20};
  bool no_split = false;
  double split_ratio = 0.8;
  std::uint64_t split_seed = 0;
  std::string relevance = "next_item";
  bool no_knn = false;
};

struct SimulateOptions {
  std::string gui;      // empty: bundled mini-hub model
  std::string model;    // optional recurrent model or transition table
  std::string catalog;  // required with a model; otherwise derived from the GUI model
  std::string out_dir = ".";
  std::string policy = "random_monkey";
  double epsilon = 0.1;
  std::size_t top_k = 10;
  std::size_t steps = 30;
  std::size_t episodes = 100;
  std::uint64_t seed = 0;
};

struct ReplicateOptions {
  std::string out_dir = "replicate-out";
  ReplicateConfig config;
  bool quiet = false;
};

// Missing keys keep their defaults, so older manifests still replay.
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(IngestOptions, events, seed_catalog, out_dir)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SynthOptions, sessions, catalog, out_dir, n_sessions, length_min,
                                                length_max, core_weight, core_min, core_max, motif_rate, noise_rate,
                                                motif_min_len, motif_max_len, motif_min_support, pad_catalog, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainOptions, sessions, catalog, out_dir, model_name, cell, loss,
                                                hidden_size, batch_size, learning_rate, adagrad_epsilon, init_scale,
                                                epochs, bptt_steps, convergence_tolerance, stop_at_convergence, seed,
                                                no_split, split_ratio, split_seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvalOptions, models, sessions, catalog, out_dir, cutoffs, no_split,
                                                split_ratio, split_seed, relevance, no_knn)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimulateOptions, gui, model, catalog, out_dir, policy, epsilon, top_k,
                                                steps, episodes, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ReplicateOptions, out_dir, config, quiet)

// Each runner writes its outputs plus manifest.json into out_dir and a
// human summary to `out`. Library errors propagate.
void run_ingest(const IngestOptions& o, std::ostream& out);
void run_synth(const SynthOptions& o, std::ostream& out);
void run_train(const TrainOptions& o, std::ostream& out);
void run_eval(const EvalOptions& o, std::ostream& out);
void run_simulate(const SimulateOptions& o, std::ostream& out);
void run_replicate_cmd(const ReplicateOptions& o, std::ostream& out, std::ostream& log);

// Re-executes the run recorded in a manifest. `out_dir` overrides the
// recorded output directory when non-empty.
void run_replay(const std::filesystem::path& manifest, const std::string& out_dir, std::ostream& out,
                std::ostream& log);

}  // namespace guirec::cli
