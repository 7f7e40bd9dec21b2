#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "guirec/catalog.hpp"

namespace guirec {

// Categorical distribution over action IDs.
struct CategoricalDist {
  std::map<ActionId, double> probs;

  // Throws ValidationError unless probabilities are >= 0 and sum to 1 within 1e-9.
  void validate() const;
};

// Empirical action frequencies: the maximum-entropy distribution subject to
// the observed first-order marginals. Throws ValidationError on an empty log.
CategoricalDist estimate_marginals(const SessionLog& log);

struct Motif {
  std::vector<ActionId> actions;
  std::size_t support = 0;  // number of sessions containing `actions` contiguously

  bool operator==(const Motif&) const = default;
};

// Contiguous subsequences of length [min_len, max_len] contained in at least
// `min_support` sessions. Ordered longest first, then by descending support,
// then lexicographically. A motif contained in a longer reported motif with
// the same support is dropped.
std::vector<Motif> extract_motifs(const SessionLog& log, std::size_t min_len, std::size_t max_len,
                                  std::size_t min_support);

struct SynthConfig {
  std::size_t n_sessions = 100;
  // Session lengths: with probability core_weight uniform on [core_min, core_max],
  // otherwise uniform on [length_min, length_max]. core_weight 0 is a plain
  // uniform length model.
  std::size_t length_min = 1;
  std::size_t length_max = 49;
  double core_weight = 0.0;
  std::size_t core_min = 4;
  std::size_t core_max = 19;
  double motif_rate = 0.8;
  double noise_rate = 0.05;
  std::uint64_t seed = 0;
  std::int64_t base_timestamp = 1568600000;
  std::int64_t timestamp_step = 60;

  void validate() const;
};

// Replication defaults: 80 % U[4,19] + 20 % U[1,49], mean length 14.2.
SynthConfig replication_synth_config();

using WarningSink = std::function<void(std::string_view)>;

// Generates cfg.n_sessions sessions over `catalog`. Per session: draw a
// length; with probability motif_rate embed one motif that fits (chosen in
// proportion to support) at a uniform position; fill the other slots i.i.d.
// from `dist`; then replace each ID with a uniform catalog ID with probability
// noise_rate. Motifs longer than the maximum length are reported to `warn`
// and skipped. Deterministic in (dist, motifs, cfg, catalog).
SessionLog generate_sessions(const CategoricalDist& dist, std::span<const Motif> motifs, const SynthConfig& cfg,
                             const ActionCatalog& catalog, const WarningSink& warn = {});

// Registers placeholder signatures until the catalog holds `target_size`
// actions. These stand for GUI actions never seen in recordings.
void pad_catalog(ActionCatalog& catalog, std::size_t target_size);

// Sum over IDs of |p(id) - q(id)|.
double l1_distance(const CategoricalDist& p, const CategoricalDist& q);

}  // namespace guirec
