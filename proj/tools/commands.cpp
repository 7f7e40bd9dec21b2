#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include "guirec/bundled_data.hpp"
#include "guirec/errors.hpp"
#include "guirec/eval.hpp"
#include "guirec/gui_model.hpp"
#include "guirec/knn.hpp"
#include "guirec/model_io.hpp"
#include "guirec/rnn_recommender.hpp"
#include "guirec/session_io.hpp"
#include "guirec/simulator.hpp"
#include "guirec/synth.hpp"
#include "guirec/table_recommender.hpp"
#include "guirec/train.hpp"

#ifndef GUIREC_VERSION
#define GUIREC_VERSION "0.0.0"
#endif

namespace guirec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path prepare_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error("cannot create output directory '" + p.string() + "': " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + path.string() + "'");
  return out;
}

void write_manifest(const fs::path& dir, std::string_view subcommand, const json& options, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  json m;
  m["artifact_version"] = "guirec " GUIREC_VERSION;
  m["subcommand"] = subcommand;
  m["seed"] = seed;
  m["options"] = options;
  m["outputs"] = outputs;
  auto out = open_out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required option ") + flag);
}

SessionLog load_log(const std::string& sessions, const std::string& catalog) {
  require(sessions, "--sessions");
  require(catalog, "--catalog");
  return load_session_log(sessions, catalog);
}

EvalConfig split_config(double ratio, std::uint64_t seed) {
  EvalConfig ec;
  ec.split_ratio = ratio;
  ec.seed = seed;
  return ec;
}

// Loads a recurrent model or a transition table, sniffing the header.
std::unique_ptr<Recommender> load_recommender(const std::string& path, const std::string& name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  if (is_table_stream(in)) return std::make_unique<TransitionTable>(load_table(in, name));
  if (is_model_stream(in)) {
    auto model = std::make_shared<const RecurrentModel>(load_model(in));
    return std::make_unique<RnnRecommender>(model, name);
  }
  throw ParseError("'" + path + "' is neither a guirec model nor a transition table", 0);
}

RelevanceMode parse_relevance(const std::string& name) {
  if (name == "next_item") return RelevanceMode::next_item;
  if (name == "remaining_items") return RelevanceMode::remaining_items;
  throw ConfigError("unknown relevance mode '" + name + "' (expected next_item or remaining_items)");
}

}  // namespace

void run_ingest(const IngestOptions& o, std::ostream& out) {
  require(o.events, "--events");
  const auto events = load_events(o.events);
  ActionCatalog seed;
  if (!o.seed_catalog.empty()) seed = load_catalog(o.seed_catalog);
  const auto log = ingest_events(events, std::move(seed));
  const auto dir = prepare_dir(o.out_dir);
  save_session_log(log, dir / "sessions.csv", dir / "catalog.csv");
  write_manifest(dir, "ingest", o, 0, {"sessions.csv", "catalog.csv"});
  out << "ingested " << events.size() << " events into " << log.sessions.size() << " sessions over "
      << log.catalog.size() << " actions\n";
}

void run_synth(const SynthOptions& o, std::ostream& out) {
  auto base = load_log(o.sessions, o.catalog);
  const auto marginals = estimate_marginals(base);
  const auto motifs = extract_motifs(base, o.motif_min_len, o.motif_max_len, o.motif_min_support);

  ActionCatalog catalog = base.catalog;
  if (o.pad_catalog > catalog.size()) pad_catalog(catalog, o.pad_catalog);

  SynthConfig sc;
  sc.n_sessions = o.n_sessions;
  sc.length_min = o.length_min;
  sc.length_max = o.length_max;
  sc.core_weight = o.core_weight;
  sc.core_min = o.core_min;
  sc.core_max = o.core_max;
  sc.motif_rate = o.motif_rate;
  sc.noise_rate = o.noise_rate;
  sc.seed = o.seed;
  if (!base.sessions.empty()) sc.base_timestamp = base.sessions.back().start_timestamp + sc.timestamp_step;

  const auto synthetic = generate_sessions(marginals, motifs, sc, catalog, [&](std::string_view w) {
    std::cerr << "warning: " << w << '\n';
  });
  const double l1 = l1_distance(marginals, estimate_marginals(synthetic));
  const auto original = base.sessions.size();
  append_sessions(base, synthetic);
  validate(base);

  const auto dir = prepare_dir(o.out_dir);
  save_session_log(base, dir / "sessions.csv", dir / "catalog.csv");
  write_manifest(dir, "synth", o, o.seed, {"sessions.csv", "catalog.csv"});
  out << "appended " << synthetic.sessions.size() << " synthetic sessions to " << original << " (" << motifs.size()
      << " motifs, marginal L1 " << l1 << ")\n";
}

void run_train(const TrainOptions& o, std::ostream& out) {
  const auto log = load_log(o.sessions, o.catalog);
  NetworkConfig nc;
  nc.n_actions = log.catalog.size();
  nc.hidden_size = o.hidden_size;
  nc.cell_kind = parse_cell_kind(o.cell);
  nc.loss_kind = parse_loss_kind(o.loss);
  nc.batch_size = o.batch_size;
  nc.learning_rate = o.learning_rate;
  nc.adagrad_epsilon = o.adagrad_epsilon;
  nc.init_scale = o.init_scale;
  nc.epochs = o.epochs;
  nc.bptt_steps = o.bptt_steps;
  nc.convergence_tolerance = o.convergence_tolerance;
  nc.stop_at_convergence = o.stop_at_convergence;
  nc.seed = o.seed;
  nc.validate();
  require(o.model_name, "--model-name");

  SessionLog train_log;
  if (o.no_split) {
    train_log = log;
  } else {
    train_log = split_sessions(log, split_config(o.split_ratio, o.split_seed)).train;
  }

  const auto label = model_label(nc);
  auto result = train(train_log, nc, [&](const EpochStats& e) {
    out << label << " epoch " << e.epoch << " loss " << e.mean_loss << '\n';
  });

  const auto dir = prepare_dir(o.out_dir);
  save_model(dir / o.model_name, result.model);
  {
    auto trace = open_out(dir / "loss_trace.csv");
    write_loss_trace_csv(trace, {TrainedVariant{label, result}});
  }
  write_manifest(dir, "train", o, o.seed, {o.model_name, "loss_trace.csv"});
  out << "trained " << label << " on " << train_log.sessions.size() << " sessions for " << result.trace.size()
      << " epochs";
  if (result.converged_epoch) out << ", converged at epoch " << *result.converged_epoch;
  out << '\n';
}

void run_eval(const EvalOptions& o, std::ostream& out) {
  if (o.models.empty() && o.no_knn) throw ConfigError("nothing to evaluate: give --model or drop --no-knn");
  const auto log = load_log(o.sessions, o.catalog);
  EvalConfig ec = split_config(o.split_ratio, o.split_seed);
  ec.cutoffs = o.cutoffs;
  ec.relevance = parse_relevance(o.relevance);
  ec.validate();

  SessionLog train_log;
  SessionLog test_log;
  if (o.no_split) {
    train_log = test_log = log;
  } else {
    auto split = split_sessions(log, ec);
    train_log = std::move(split.train);
    test_log = std::move(split.test);
  }

  EvalReport report;
  std::vector<std::string> names;
  for (const auto& path : o.models) {
    std::string name = fs::path(path).stem().string();
    while (std::find(names.begin(), names.end(), name) != names.end()) name += "'";
    names.push_back(name);
    const auto rec = load_recommender(path, name);
    if (rec->n_actions() < log.catalog.size()) {
      throw IntegrityError("model '" + path + "' knows " + std::to_string(rec->n_actions()) +
                           " actions but the catalog has " + std::to_string(log.catalog.size()));
    }
    report.append(sequential_evaluate(*rec, test_log, ec));
  }
  if (!o.no_knn) report.append(sequential_evaluate(KnnRecommender(fit_knn(train_log)), test_log, ec));

  const auto dir = prepare_dir(o.out_dir);
  {
    auto csv = open_out(dir / "eval.csv");
    write_report_csv(csv, report);
  }
  write_manifest(dir, "eval", o, o.split_seed, {"eval.csv"});
  print_report_table(out, report);
}

void run_simulate(const SimulateOptions& o, std::ostream& out) {
  const GuiModel gui = o.gui.empty() ? load_gui_model(bundled::mini_hub_model()) : load_gui_model_file(o.gui);
  if (!o.model.empty() && o.catalog.empty()) {
    throw ConfigError("--model needs --catalog so GUI actions map to the model's action IDs");
  }
  ActionCatalog catalog;
  if (!o.catalog.empty()) {
    catalog = load_catalog(o.catalog);
  } else {
    register_gui_actions(gui, catalog);
  }

  GeneratorPolicy policy;
  policy.kind = parse_policy_kind(o.policy);
  policy.epsilon = o.epsilon;
  policy.top_k = o.top_k;
  policy.max_steps = o.steps;
  policy.seed = o.seed;
  policy.validate();
  if (policy.kind == PolicyKind::recommender_guided && o.model.empty()) {
    throw ConfigError("--policy recommender_guided needs --model");
  }
  if (o.episodes == 0) throw ConfigError("--episodes must be >= 1");

  std::unique_ptr<Recommender> rec;
  if (!o.model.empty()) rec = load_recommender(o.model, fs::path(o.model).stem().string());
  const auto episodes = run_episodes(gui, rec.get(), policy, catalog, o.episodes);
  const auto summary = summarize(episodes);

  const auto dir = prepare_dir(o.out_dir);
  {
    auto csv = open_out(dir / "episodes.csv");
    write_episode_csv(csv, episodes);
  }
  write_manifest(dir, "simulate", o, o.seed, {"episodes.csv"});
  out << to_string(policy.kind) << ": " << summary.episodes << " episodes, gate pass rate " << summary.gate_pass_rate
      << ", mean unique states " << summary.mean_unique_states << ", mean gates passed " << summary.mean_gates_passed
      << ", mean gates blocked " << summary.mean_gates_blocked << '\n';
}

void run_replicate_cmd(const ReplicateOptions& o, std::ostream& out, std::ostream& log) {
  o.config.validate();
  const auto result = run_replicate(o.config, [&](std::string_view msg) {
    if (!o.quiet) log << msg << std::endl;
  });
  const auto dir = prepare_dir(o.out_dir);
  std::vector<std::string> names;
  for (const auto& p : write_replicate_reports(result, dir)) names.push_back(p.filename().string());
  write_manifest(dir, "replicate", o, o.config.seed, names);
  write_replicate_summary(out, result);
}

void run_replay(const fs::path& manifest, const std::string& out_dir, std::ostream& out, std::ostream& log) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw Error("cannot open manifest '" + manifest.string() + "'");
  try {
    const json m = json::parse(in);
    const auto sub = m.at("subcommand").get<std::string>();
    const auto& opts = m.at("options");
    auto run = [&](auto options, auto&& fn) {
      if (!out_dir.empty()) options.out_dir = out_dir;
      fn(options);
    };
    if (sub == "ingest") {
      run(opts.get<IngestOptions>(), [&](const auto& o) { run_ingest(o, out); });
    } else if (sub == "synth") {
      run(opts.get<SynthOptions>(), [&](const auto& o) { run_synth(o, out); });
    } else if (sub == "train") {
      run(opts.get<TrainOptions>(), [&](const auto& o) { run_train(o, out); });
    } else if (sub == "eval") {
      run(opts.get<EvalOptions>(), [&](const auto& o) { run_eval(o, out); });
    } else if (sub == "simulate") {
      run(opts.get<SimulateOptions>(), [&](const auto& o) { run_simulate(o, out); });
    } else if (sub == "replicate") {
      run(opts.get<ReplicateOptions>(), [&](const auto& o) { run_replicate_cmd(o, out, log); });
    } else {
      throw ConfigError("manifest names unknown subcommand '" + sub + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError("manifest '" + manifest.string() + "': " + e.what(), 0);
  }
}

}  // namespace guirec::cli
