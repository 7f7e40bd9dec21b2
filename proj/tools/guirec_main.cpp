#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "guirec/errors.hpp"

namespace {

// Exit codes, one per failure category.
enum Exit : int { ok = 0, internal = 1, usage = 2, io = 3, parse = 4, invalid = 5, numeric = 6 };

int fail(int code, const char* category, const std::exception& e) {
  std::cerr << "guirec: " << category << " error: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace guirec::cli;

  CLI::App app{"guirec: session-based next-action recommendation for GUI test generation"};
  app.set_config("--config", "", "INI/TOML file supplying option defaults ([subcommand] sections)");
  app.require_subcommand(1);
  app.set_version_flag("--version", "guirec " GUIREC_VERSION);

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Group raw GUI events into sessions and build the action catalog");
  c_ingest->add_option("--events", ingest.events, "Raw events CSV")->required();
  c_ingest->add_option("--seed-catalog", ingest.seed_catalog, "Existing catalog whose IDs are kept");
  c_ingest->add_option("--out-dir", ingest.out_dir, "Output directory")->capture_default_str();

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "Append synthetic sessions fitted to a recorded corpus");
  c_synth->add_option("--sessions", synth.sessions, "Sessions CSV")->required();
  c_synth->add_option("--catalog", synth.catalog, "Catalog CSV")->required();
  c_synth->add_option("--out-dir", synth.out_dir, "Output directory")->capture_default_str();
  c_synth->add_option("--n-sessions", synth.n_sessions, "Synthetic sessions to generate")->capture_default_str();
  c_synth->add_option("--length-min", synth.length_min)->capture_default_str();
  c_synth->add_option("--length-max", synth.length_max)->capture_default_str();
  c_synth->add_option("--core-weight", synth.core_weight, "Probability of drawing from the core length range")
      ->capture_default_str();
  c_synth->add_option("--core-min", synth.core_min)->capture_default_str();
  c_synth->add_option("--core-max", synth.core_max)->capture_default_str();
  c_synth->add_option("--motif-rate", synth.motif_rate)->capture_default_str();
  c_synth->add_option("--noise-rate", synth.noise_rate)->capture_default_str();
  c_synth->add_option("--motif-min-len", synth.motif_min_len)->capture_default_str();
  c_synth->add_option("--motif-max-len", synth.motif_max_len)->capture_default_str();
  c_synth->add_option("--motif-min-support", synth.motif_min_support)->capture_default_str();
  c_synth->add_option("--pad-catalog", synth.pad_catalog, "Grow the catalog to this many actions (0 = keep)")
      ->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();

  TrainOptions train;
  auto* c_train = app.add_subcommand("train", "Train a GRU or LSTM next-action model");
  c_train->add_option("--sessions", train.sessions, "Sessions CSV")->required();
  c_train->add_option("--catalog", train.catalog, "Catalog CSV")->required();
  c_train->add_option("--out-dir", train.out_dir, "Output directory")->capture_default_str();
  c_train->add_option("--model-name", train.model_name, "Model file name inside --out-dir")->capture_default_str();
  c_train->add_option("--cell", train.cell, "gru or lstm")->capture_default_str();
  c_train->add_option("--loss", train.loss, "top1, bpr or cross_entropy")->capture_default_str();
  c_train->add_option("--hidden-size", train.hidden_size)->capture_default_str();
  c_train->add_option("--batch-size", train.batch_size)->capture_default_str();
  c_train->add_option("--learning-rate", train.learning_rate)->capture_default_str();
  c_train->add_option("--adagrad-epsilon", train.adagrad_epsilon)->capture_default_str();
  c_train->add_option("--init-scale", train.init_scale)->capture_default_str();
  c_train->add_option("--epochs", train.epochs)->capture_default_str();
  c_train->add_option("--bptt-steps", train.bptt_steps)->capture_default_str();
  c_train->add_option("--convergence-tolerance", train.convergence_tolerance)->capture_default_str();
  c_train->add_flag("--stop-at-convergence", train.stop_at_convergence);
  c_train->add_option("--seed", train.seed)->capture_default_str();
  c_train->add_flag("--no-split", train.no_split, "Train on every session instead of the training split");
  c_train->add_option("--split-ratio", train.split_ratio)->capture_default_str();
  c_train->add_option("--split-seed", train.split_seed)->capture_default_str();

  EvalOptions eval;
  auto* c_eval = app.add_subcommand("eval", "Score models and the kNN baseline with incremental reveal");
  c_eval->add_option("--model", eval.models, "Model or transition-table file (repeatable)");
  c_eval->add_option("--sessions", eval.sessions, "Sessions CSV")->required();
  c_eval->add_option("--catalog", eval.catalog, "Catalog CSV")->required();
  c_eval->add_option("--out-dir", eval.out_dir, "Output directory")->capture_default_str();
  c_eval->add_option("--cutoffs", eval.cutoffs, "Comma-separated cutoffs")->delimiter(',')->capture_default_str();
  c_eval->add_flag("--no-split", eval.no_split, "Evaluate on every session");
  c_eval->add_option("--split-ratio", eval.split_ratio)->capture_default_str();
  c_eval->add_option("--split-seed", eval.split_seed)->capture_default_str();
  c_eval->add_option("--relevance", eval.relevance, "next_item or remaining_items")->capture_default_str();
  c_eval->add_flag("--no-knn", eval.no_knn, "Skip the kNN baseline");

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Run generator episodes against a GUI state machine");
  c_sim->add_option("--gui", sim.gui, "GUI model file (default: bundled mini-hub)");
  c_sim->add_option("--model", sim.model, "Recommender driving the guided policy");
  c_sim->add_option("--catalog", sim.catalog, "Catalog matching --model");
  c_sim->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();
  c_sim->add_option("--policy", sim.policy, "random_monkey or recommender_guided")->capture_default_str();
  c_sim->add_option("--epsilon", sim.epsilon)->capture_default_str();
  c_sim->add_option("--top-k", sim.top_k)->capture_default_str();
  c_sim->add_option("--steps", sim.steps)->capture_default_str();
  c_sim->add_option("--episodes", sim.episodes)->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->capture_default_str();

  ReplicateOptions rep;
  auto& rc = rep.config;
  auto* c_rep = app.add_subcommand("replicate", "Full experiment on the bundled mini-hub model");
  c_rep->add_option("--out-dir", rep.out_dir, "Report directory")->capture_default_str();
  c_rep->add_option("--seed", rc.seed, "Master seed")->capture_default_str();
  c_rep->add_option("--synthetic-sessions", rc.synthetic_sessions)->capture_default_str();
  c_rep->add_option("--catalog-size", rc.catalog_size)->capture_default_str();
  c_rep->add_option("--motif-min-len", rc.motif_min_len)->capture_default_str();
  c_rep->add_option("--motif-max-len", rc.motif_max_len)->capture_default_str();
  c_rep->add_option("--motif-min-support", rc.motif_min_support)->capture_default_str();
  c_rep->add_option("--hidden-size", rc.hidden_size)->capture_default_str();
  c_rep->add_option("--batch-size", rc.batch_size)->capture_default_str();
  c_rep->add_option("--max-epochs", rc.max_epochs)->capture_default_str();
  c_rep->add_option("--learning-rate", rc.learning_rate)->capture_default_str();
  c_rep->add_option("--convergence-tolerance", rc.convergence_tolerance)->capture_default_str();
  c_rep->add_option("--cutoffs", rc.cutoffs)->delimiter(',')->capture_default_str();
  c_rep->add_option("--split-ratio", rc.split_ratio)->capture_default_str();
  c_rep->add_option("--episodes", rc.episodes)->capture_default_str();
  c_rep->add_option("--episode-steps", rc.episode_steps)->capture_default_str();
  c_rep->add_option("--top-k", rc.top_k)->capture_default_str();
  c_rep->add_option("--epsilon", rc.epsilon)->capture_default_str();
  c_rep->add_flag("--quiet", rep.quiet, "No progress log on stderr");

  std::string manifest;
  std::string replay_out;
  auto* c_replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest.json");
  c_replay->add_option("manifest", manifest, "manifest.json written by an earlier run")->required();
  c_replay->add_option("--out-dir", replay_out, "Override the recorded output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Exit::ok : Exit::usage;
  }

  try {
    if (c_ingest->parsed()) run_ingest(ingest, std::cout);
    if (c_synth->parsed()) run_synth(synth, std::cout);
    if (c_train->parsed()) run_train(train, std::cout);
    if (c_eval->parsed()) run_eval(eval, std::cout);
    if (c_sim->parsed()) run_simulate(sim, std::cout);
    if (c_rep->parsed()) run_replicate_cmd(rep, std::cout, std::cerr);
    if (c_replay->parsed()) run_replay(manifest, replay_out, std::cout, std::cerr);
  } catch (const guirec::ConfigError& e) {
    return fail(Exit::usage, "configuration", e);
  } catch (const guirec::ParseError& e) {
    return fail(Exit::parse, "parse", e);
  } catch (const guirec::ValidationError& e) {
    return fail(Exit::invalid, "validation", e);
  } catch (const guirec::IntegrityError& e) {
    return fail(Exit::invalid, "integrity", e);
  } catch (const guirec::NumericError& e) {
    return fail(Exit::numeric, "numeric", e);
  } catch (const guirec::Error& e) {
    return fail(Exit::io, "I/O", e);
  } catch (const std::exception& e) {
    return fail(Exit::internal, "internal", e);
  }
  return Exit::ok;
}
