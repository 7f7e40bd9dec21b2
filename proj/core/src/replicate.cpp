#include "guirec/replicate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>

#include "guirec/bundled_data.hpp"
#include "guirec/errors.hpp"
#include "guirec/knn.hpp"
#include "guirec/model_io.hpp"
#include "guirec/rng.hpp"
#include "guirec/rnn_recommender.hpp"
#include "guirec/session_io.hpp"

namespace guirec {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

struct Variant {
  CellKind cell;
  LossKind loss;
  ReplicateStream stream;
};

constexpr Variant kVariants[] = {
    {CellKind::gru, LossKind::top1, ReplicateStream::gru_top1},
    {CellKind::gru, LossKind::bpr, ReplicateStream::gru_bpr},
    {CellKind::gru, LossKind::cross_entropy, ReplicateStream::gru_ce},
    {CellKind::lstm, LossKind::cross_entropy, ReplicateStream::lstm_ce},
};

}  // namespace

void ReplicateConfig::validate() const {
  if (synthetic_sessions == 0) throw ConfigError("synthetic_sessions must be >= 1");
  if (motif_min_len < 1 || motif_max_len < motif_min_len) throw ConfigError("motif length range is empty");
  if (motif_min_support < 1) throw ConfigError("motif_min_support must be >= 1");
  if (max_epochs < 2) throw ConfigError("max_epochs must be >= 2");
  if (episodes == 0 || episode_steps == 0) throw ConfigError("episodes and episode_steps must be >= 1");
  if (top_k == 0) throw ConfigError("top_k must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  EvalConfig ec;
  ec.cutoffs = cutoffs;
  ec.split_ratio = split_ratio;
  ec.validate();
}

std::uint64_t replicate_seed(const ReplicateConfig& cfg, ReplicateStream stream) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(stream));
}

double top_k_share(const SessionLog& log, std::size_t k) {
  std::map<ActionId, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& s : log.sessions) {
    for (auto id : s.action_ids) ++counts[id];
    total += s.action_ids.size();
  }
  if (total == 0) return 0.0;
  std::vector<std::size_t> freq;
  for (const auto& [id, c] : counts) freq.push_back(c);
  std::sort(freq.begin(), freq.end(), std::greater<>());
  std::size_t covered = 0;
  for (std::size_t i = 0; i < std::min(k, freq.size()); ++i) covered += freq[i];
  return static_cast<double>(covered) / static_cast<double>(total);
}

DatasetSummary summarize_dataset(const SessionLog& scripted, const SessionLog& corpus, std::size_t motifs) {
  DatasetSummary d;
  d.scripted_sessions = scripted.sessions.size();
  d.total_sessions = corpus.sessions.size();
  d.synthetic_sessions = d.total_sessions - d.scripted_sessions;
  d.total_actions = corpus.total_actions();
  d.catalog_size = corpus.catalog.size();
  d.motifs = motifs;
  std::vector<bool> seen(corpus.catalog.size() + 1, false);
  d.min_length = corpus.sessions.empty() ? 0 : corpus.sessions.front().action_ids.size();
  for (const auto& s : corpus.sessions) {
    d.min_length = std::min(d.min_length, s.action_ids.size());
    d.max_length = std::max(d.max_length, s.action_ids.size());
    for (auto id : s.action_ids) seen[id] = true;
  }
  d.distinct_actions = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
  if (d.total_sessions > 0) d.mean_length = static_cast<double>(d.total_actions) / static_cast<double>(d.total_sessions);
  d.scripted_top5_share = top_k_share(scripted, 5);
  return d;
}

ReplicateResult run_replicate(const ReplicateConfig& cfg, const LogSink& log) {
  cfg.validate();
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };

  ReplicateResult r;
  r.config = cfg;
  r.gui = load_gui_model(bundled::mini_hub_model());
  const auto scripts = parse_scripts(bundled::mini_hub_scripts());

  ActionCatalog catalog;
  register_gui_actions(r.gui, catalog);
  r.scripted = record_scripted_sessions(r.gui, scripts, catalog);

  const auto marginals = estimate_marginals(r.scripted);
  const auto motifs = extract_motifs(r.scripted, cfg.motif_min_len, cfg.motif_max_len, cfg.motif_min_support);

  ActionCatalog padded = r.scripted.catalog;
  pad_catalog(padded, cfg.catalog_size);

  SynthConfig sc = replication_synth_config();
  sc.n_sessions = cfg.synthetic_sessions;
  sc.seed = replicate_seed(cfg, ReplicateStream::synth);
  sc.base_timestamp = r.scripted.sessions.back().start_timestamp + 600;
  const auto synthetic = generate_sessions(marginals, motifs, sc, padded, [&](std::string_view w) {
    say("synth warning: " + std::string(w));
  });

  r.corpus = r.scripted;
  append_sessions(r.corpus, synthetic);
  validate(r.corpus);
  r.dataset = summarize_dataset(r.scripted, r.corpus, motifs.size());
  say("dataset: " + std::to_string(r.dataset.total_sessions) + " sessions, " +
      std::to_string(r.dataset.total_actions) + " actions, mean length " + fmt(r.dataset.mean_length));

  EvalConfig ec;
  ec.cutoffs = cfg.cutoffs;
  ec.split_ratio = cfg.split_ratio;
  ec.seed = replicate_seed(cfg, ReplicateStream::split);
  r.split = split_sessions(r.corpus, ec);

  std::vector<std::shared_ptr<const RecurrentModel>> models;
  for (const auto& v : kVariants) {
    NetworkConfig nc;
    nc.n_actions = r.corpus.catalog.size();
    nc.hidden_size = cfg.hidden_size;
    nc.cell_kind = v.cell;
    nc.loss_kind = v.loss;
    nc.batch_size = cfg.batch_size;
    nc.learning_rate = cfg.learning_rate;
    nc.epochs = cfg.max_epochs;
    nc.seed = replicate_seed(cfg, v.stream);
    nc.convergence_tolerance = cfg.convergence_tolerance;
    nc.stop_at_convergence = true;
    const auto label = model_label(nc);
    say("training " + label);
    auto result = train(r.split.train, nc, [&](const EpochStats& e) {
      say("  " + label + " epoch " + std::to_string(e.epoch) + " loss " + fmt(e.mean_loss));
    });
    models.push_back(std::make_shared<const RecurrentModel>(result.model));
    r.variants.push_back({label, std::move(result)});
  }

  const auto largest = cfg.cutoffs.back();
  double best_mrr = -1.0;
  double best_gru_mrr = -1.0;
  std::shared_ptr<const RecurrentModel> guide;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const RnnRecommender rec(models[i], r.variants[i].label);
    say("evaluating " + rec.name());
    r.report.append(sequential_evaluate(rec, r.split.test, ec));
    const double mrr = r.report.row(rec.name(), largest).mrr;
    if (mrr > best_mrr) {
      best_mrr = mrr;
      r.best_model = rec.name();
    }
    if (models[i]->config.cell_kind == CellKind::gru && mrr > best_gru_mrr) {
      best_gru_mrr = mrr;
      r.guided_model = rec.name();
      guide = models[i];
    }
  }
  const KnnRecommender knn(fit_knn(r.split.train));
  say("evaluating knn");
  r.report.append(sequential_evaluate(knn, r.split.test, ec));

  const auto first = cfg.cutoffs.front();
  r.best_mrr1 = r.report.row(r.best_model, first).mrr;
  r.knn_mrr1 = r.report.row(knn.name(), first).mrr;
  if (r.knn_mrr1 > 0.0) r.improvement_pct = (r.best_mrr1 - r.knn_mrr1) / r.knn_mrr1 * 100.0;

  GeneratorPolicy policy;
  policy.epsilon = cfg.epsilon;
  policy.top_k = cfg.top_k;
  policy.max_steps = cfg.episode_steps;
  policy.seed = replicate_seed(cfg, ReplicateStream::episodes);

  policy.kind = PolicyKind::random_monkey;
  say("simulating monkey");
  r.monkey_episodes = run_episodes(r.gui, nullptr, policy, r.corpus.catalog, cfg.episodes);
  r.monkey = summarize(r.monkey_episodes);

  policy.kind = PolicyKind::recommender_guided;
  const RnnRecommender guide_rec(guide, r.guided_model);
  say("simulating guided (" + r.guided_model + ")");
  r.guided_episodes = run_episodes(r.gui, &guide_rec, policy, r.corpus.catalog, cfg.episodes);
  r.guided = summarize(r.guided_episodes);
  return r;
}

void write_loss_trace_csv(std::ostream& out, const std::vector<TrainedVariant>& variants) {
  out << "model,epoch,mean_loss,relative_improvement,predictions,updates\n";
  char buf[160];
  for (const auto& v : variants) {
    for (const auto& e : v.result.trace) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,", e.epoch, e.mean_loss);
      out << v.label << ',' << buf;
      if (e.relative_improvement) {
        std::snprintf(buf, sizeof buf, "%.17g", *e.relative_improvement);
        out << buf;
      }
      out << ',' << e.predictions << ',' << e.updates << '\n';
    }
  }
}

void write_dataset_csv(std::ostream& out, const DatasetSummary& d) {
  out << "metric,value\n"
      << "scripted_sessions," << d.scripted_sessions << '\n'
      << "synthetic_sessions," << d.synthetic_sessions << '\n'
      << "total_sessions," << d.total_sessions << '\n'
      << "total_actions," << d.total_actions << '\n'
      << "catalog_size," << d.catalog_size << '\n'
      << "distinct_actions," << d.distinct_actions << '\n'
      << "mean_length," << fmt(d.mean_length) << '\n'
      << "min_length," << d.min_length << '\n'
      << "max_length," << d.max_length << '\n'
      << "motifs," << d.motifs << '\n'
      << "scripted_top5_share," << fmt(d.scripted_top5_share) << '\n';
}

void write_replicate_summary(std::ostream& out, const ReplicateResult& r) {
  const auto& d = r.dataset;
  out << "seed " << r.config.seed << '\n'
      << "sessions " << d.scripted_sessions << " scripted + " << d.synthetic_sessions << " synthetic = "
      << d.total_sessions << '\n'
      << "actions " << d.total_actions << ", catalog " << d.catalog_size << ", distinct " << d.distinct_actions << '\n'
      << "length mean " << fmt(d.mean_length) << " min " << d.min_length << " max " << d.max_length << '\n'
      << "split " << r.split.train.sessions.size() << " train / " << r.split.test.sessions.size() << " test\n\n";

  for (const auto& v : r.variants) {
    out << v.label << ": " << v.result.trace.size() << " epochs, final loss " << fmt(v.result.trace.back().mean_loss)
        << ", converged at "
        << (v.result.converged_epoch ? std::to_string(*v.result.converged_epoch) : std::string("-")) << '\n';
  }
  out << '\n';
  print_report_table(out, r.report);
  out << "\nbest model " << r.best_model << ", mrr@" << r.config.cutoffs.front() << ' ' << fmt(r.best_mrr1)
      << " vs knn " << fmt(r.knn_mrr1);
  if (r.improvement_pct) out << " (" << fmt(*r.improvement_pct) << " %)";
  out << "\n\n";
  out << "generator  gate_pass_rate  mean_unique_states  mean_gates_passed  mean_gates_blocked\n";
  auto line = [&](const char* name, const EpisodeSummary& s) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-9s  %14.6f  %18.6f  %17.6f  %18.6f\n", name, s.gate_pass_rate,
                  s.mean_unique_states, s.mean_gates_passed, s.mean_gates_blocked);
    out << buf;
  };
  line("monkey", r.monkey);
  line("guided", r.guided);
  out << "guided model " << r.guided_model << '\n';
}

std::vector<std::filesystem::path> write_replicate_reports(const ReplicateResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto track = [&](const std::string& name) {
    written.push_back(dir / name);
    return written.back();
  };

  const auto sessions_path = track("sessions.csv");
  const auto catalog_path = track("catalog.csv");
  save_session_log(r.corpus, sessions_path, catalog_path);
  {
    auto out = open_out(track("dataset.csv"));
    write_dataset_csv(out, r.dataset);
  }
  {
    auto out = open_out(track("loss_trace.csv"));
    write_loss_trace_csv(out, r.variants);
  }
  {
    auto out = open_out(track("eval.csv"));
    write_report_csv(out, r.report);
  }
  {
    auto out = open_out(track("episodes_monkey.csv"));
    write_episode_csv(out, r.monkey_episodes);
  }
  {
    auto out = open_out(track("episodes_guided.csv"));
    write_episode_csv(out, r.guided_episodes);
  }
  {
    auto out = open_out(track("summary.txt"));
    write_replicate_summary(out, r);
  }
  for (const auto& v : r.variants) save_model(track("model-" + v.label + ".bin"), v.result.model);
  return written;
}

}  // namespace guirec
