#include "guirec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "guirec/errors.hpp"
#include "guirec/rng.hpp"

namespace guirec {

void CategoricalDist::validate() const {
  if (probs.empty()) throw ValidationError("categorical distribution is empty");
  double total = 0.0;
  for (const auto& [id, p] : probs) {
    if (!(p >= 0.0)) throw ValidationError("negative probability for action " + std::to_string(id));
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", expected 1");
  }
}

CategoricalDist estimate_marginals(const SessionLog& log) {
  const std::size_t total = log.total_actions();
  if (total == 0) throw ValidationError("cannot estimate marginals from an empty session log");
  std::map<ActionId, std::size_t> counts;
  for (const auto& s : log.sessions) {
    for (ActionId id : s.action_ids) ++counts[id];
  }
  CategoricalDist dist;
  for (const auto& [id, count] : counts) {
    dist.probs[id] = static_cast<double>(count) / static_cast<double>(total);
  }
  return dist;
}

namespace {

bool contains_contiguous(const std::vector<ActionId>& haystack, const std::vector<ActionId>& needle) {
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace

std::vector<Motif> extract_motifs(const SessionLog& log, std::size_t min_len, std::size_t max_len,
                                  std::size_t min_support) {
  if (min_len < 2 || min_len > max_len) {
    throw ValidationError("extract_motifs requires 2 <= min_len <= max_len");
  }
  std::map<std::vector<ActionId>, std::size_t> support;
  for (const auto& s : log.sessions) {
    std::set<std::vector<ActionId>> seen;
    const auto& ids = s.action_ids;
    for (std::size_t len = min_len; len <= std::min(max_len, ids.size()); ++len) {
      for (std::size_t start = 0; start + len <= ids.size(); ++start) {
        seen.emplace(ids.begin() + static_cast<std::ptrdiff_t>(start),
                     ids.begin() + static_cast<std::ptrdiff_t>(start + len));
      }
    }
    for (auto& sub : seen) ++support[sub];
  }

  std::vector<Motif> candidates;
  for (auto& [actions, count] : support) {
    if (count >= std::max<std::size_t>(min_support, 1)) candidates.push_back({actions, count});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Motif& a, const Motif& b) {
    if (a.actions.size() != b.actions.size()) return a.actions.size() > b.actions.size();
    if (a.support != b.support) return a.support > b.support;
    return a.actions < b.actions;
  });

  std::vector<Motif> kept;
  for (auto& candidate : candidates) {
    const bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Motif& longer) {
      return longer.support == candidate.support && longer.actions.size() > candidate.actions.size() &&
             contains_contiguous(longer.actions, candidate.actions);
    });
    if (!subsumed) kept.push_back(std::move(candidate));
  }
  return kept;
}

void SynthConfig::validate() const {
  if (n_sessions == 0) throw ConfigError("n_sessions must be >= 1");
  if (length_min < 1 || length_min > length_max) throw ConfigError("require 1 <= length_min <= length_max");
  if (core_weight > 0.0 && (core_min < 1 || core_min > core_max)) {
    throw ConfigError("require 1 <= core_min <= core_max");
  }
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(core_weight) || !in_unit(motif_rate) || !in_unit(noise_rate)) {
    throw ConfigError("core_weight, motif_rate and noise_rate must lie in [0, 1]");
  }
  if (timestamp_step < 0) throw ConfigError("timestamp_step must be >= 0");
}

SynthConfig replication_synth_config() {
  SynthConfig cfg;
  cfg.n_sessions = 3476;
  cfg.length_min = 1;
  cfg.length_max = 49;
  cfg.core_weight = 0.8;
  cfg.core_min = 4;
  cfg.core_max = 19;
  cfg.motif_rate = 0.8;
  cfg.noise_rate = 0.05;
  return cfg;
}

SessionLog generate_sessions(const CategoricalDist& dist, std::span<const Motif> motifs, const SynthConfig& cfg,
                             const ActionCatalog& catalog, const WarningSink& warn) {
  dist.validate();
  cfg.validate();
  if (catalog.empty()) throw ValidationError("generate_sessions needs a non-empty catalog");
  for (const auto& [id, p] : dist.probs) {
    if (!catalog.contains(id)) throw IntegrityError("distribution references unknown action " + std::to_string(id));
  }

  const std::size_t longest = cfg.core_weight > 0.0 ? std::max(cfg.length_max, cfg.core_max) : cfg.length_max;
  std::vector<const Motif*> usable;
  for (const auto& motif : motifs) {
    for (ActionId id : motif.actions) {
      if (!catalog.contains(id)) throw IntegrityError("motif references unknown action " + std::to_string(id));
    }
    if (motif.actions.size() > longest) {
      if (warn) warn("motif of length " + std::to_string(motif.actions.size()) + " exceeds maximum session length; skipped");
      continue;
    }
    usable.push_back(&motif);
  }

  std::vector<ActionId> dist_ids;
  std::vector<double> dist_weights;
  for (const auto& [id, p] : dist.probs) {
    dist_ids.push_back(id);
    dist_weights.push_back(p);
  }

  Rng rng(cfg.seed);
  SessionLog log;
  log.catalog = catalog;
  log.sessions.reserve(cfg.n_sessions);
  std::vector<double> motif_weights;
  std::vector<const Motif*> fitting;

  for (std::size_t i = 0; i < cfg.n_sessions; ++i) {
    std::size_t length = 0;
    if (cfg.core_weight > 0.0 && rng.bernoulli(cfg.core_weight)) {
      length = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(cfg.core_min),
                                                        static_cast<std::int64_t>(cfg.core_max)));
    } else {
      length = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(cfg.length_min),
                                                        static_cast<std::int64_t>(cfg.length_max)));
    }

    std::vector<ActionId> ids(length, 0);
    std::vector<bool> filled(length, false);

    const bool embed = rng.bernoulli(cfg.motif_rate);
    if (embed) {
      fitting.clear();
      motif_weights.clear();
      for (const Motif* m : usable) {
        if (m->actions.size() <= length && m->support > 0) {
          fitting.push_back(m);
          motif_weights.push_back(static_cast<double>(m->support));
        }
      }
      if (!fitting.empty()) {
        const Motif& motif = *fitting[rng.weighted_index(motif_weights)];
        const auto offset = rng.uniform_index(length - motif.actions.size() + 1);
        for (std::size_t k = 0; k < motif.actions.size(); ++k) {
          ids[offset + k] = motif.actions[k];
          filled[offset + k] = true;
        }
      }
    }
    for (std::size_t k = 0; k < length; ++k) {
      if (!filled[k]) ids[k] = dist_ids[rng.weighted_index(dist_weights)];
    }
    if (cfg.noise_rate > 0.0) {
      for (auto& id : ids) {
        if (rng.bernoulli(cfg.noise_rate)) id = static_cast<ActionId>(rng.uniform_index(catalog.size()) + 1);
      }
    }

    Session session;
    session.session_id = i + 1;
    session.start_timestamp = cfg.base_timestamp + static_cast<std::int64_t>(i) * cfg.timestamp_step;
    session.action_ids = std::move(ids);
    log.sessions.push_back(std::move(session));
  }
  return log;
}

void pad_catalog(ActionCatalog& catalog, std::size_t target_size) {
  std::size_t k = 1;
  while (catalog.size() < target_size) {
    catalog.intern({"/synthetic", "//*[@data-synthetic-action='" + std::to_string(k++) + "']", ActionType::other});
  }
}

double l1_distance(const CategoricalDist& p, const CategoricalDist& q) {
  std::set<ActionId> ids;
  for (const auto& [id, v] : p.probs) ids.insert(id);
  for (const auto& [id, v] : q.probs) ids.insert(id);
  double total = 0.0;
  for (ActionId id : ids) {
    auto pi = p.probs.find(id);
    auto qi = q.probs.find(id);
    total += std::abs((pi == p.probs.end() ? 0.0 : pi->second) - (qi == q.probs.end() ? 0.0 : qi->second));
  }
  return total;
}

}  // namespace guirec
