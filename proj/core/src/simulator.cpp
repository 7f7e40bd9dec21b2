#include "guirec/simulator.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>

#include "guirec/errors.hpp"
#include "guirec/rng.hpp"

namespace guirec {

EpisodeState EpisodeState::start(const GuiModel& model) {
  EpisodeState episode;
  episode.state = model.initial_state;
  episode.visited.insert(model.initial_state);
  return episode;
}

bool is_subsequence(std::span<const ActionSignature> required, std::span<const ActionSignature> history) {
  std::size_t matched = 0;
  for (const auto& action : history) {
    if (matched == required.size()) break;
    if (action == required[matched]) ++matched;
  }
  return matched == required.size();
}

StepOutcome step(const GuiModel& model, EpisodeState& episode, const ActionSignature& action) {
  if (action.page != episode.state) return {StepKind::no_op, episode.state};
  auto it = model.transitions.find(action);
  if (it == model.transitions.end()) return {StepKind::no_op, episode.state};

  const GateRule* gate = model.gate_for(action);
  if (gate && !is_subsequence(gate->required_prefix, episode.history)) {
    episode.history.push_back(action);
    ++episode.gate_attempts_blocked;
    return {StepKind::blocked, episode.state};
  }
  episode.history.push_back(action);
  if (gate) ++episode.gates_passed;
  episode.state = it->second;
  episode.visited.insert(episode.state);
  return {StepKind::moved, episode.state};
}

std::vector<RawEvent> script_events(const GuiModel& model, std::span<const Script> scripts,
                                    std::int64_t base_timestamp) {
  std::vector<RawEvent> events;
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    const auto& script = scripts[i];
    char key[32];
    std::snprintf(key, sizeof key, "script-%03zu", i + 1);
    EpisodeState episode = EpisodeState::start(model);
    const std::int64_t start = base_timestamp + 600 * static_cast<std::int64_t>(i);
    for (std::size_t k = 0; k < script.steps.size(); ++k) {
      const auto& action = script.steps[k];
      const auto outcome = step(model, episode, action);
      if (outcome.kind != StepKind::moved) {
        throw ValidationError("script '" + script.name + "' step " + std::to_string(k + 1) + ": " +
                              format_signature(action) +
                              (outcome.kind == StepKind::blocked ? " is blocked by a gate" : " is not available") +
                              " in state '" + episode.state + "'");
      }
      RawEvent event;
      event.session_key = key;
      event.timestamp = start + 3 * static_cast<std::int64_t>(k);
      event.page = action.page;
      event.element_locator = action.element_locator;
      event.action_type = action.action_type;
      if (action.action_type == ActionType::type_text) event.input_data = "input-" + std::to_string(k + 1);
      events.push_back(std::move(event));
    }
  }
  return events;
}

SessionLog record_scripted_sessions(const GuiModel& model, std::span<const Script> scripts, ActionCatalog catalog,
                                    std::int64_t base_timestamp) {
  const auto events = script_events(model, scripts, base_timestamp);
  return ingest_events(events, std::move(catalog));
}

std::string_view to_string(PolicyKind kind) {
  return kind == PolicyKind::random_monkey ? "random_monkey" : "recommender_guided";
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "random_monkey" || name == "monkey") return PolicyKind::random_monkey;
  if (name == "recommender_guided" || name == "guided") return PolicyKind::recommender_guided;
  throw ConfigError("unknown policy '" + std::string(name) + "' (expected random_monkey or recommender_guided)");
}

void GeneratorPolicy::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
}

EpisodeStats generate_test(const GuiModel& model, const Recommender* recommender, const GeneratorPolicy& policy,
                           const ActionCatalog& catalog) {
  policy.validate();
  if (policy.kind == PolicyKind::recommender_guided && !recommender) {
    throw ConfigError("recommender_guided policy needs a recommender");
  }

  std::map<ActionSignature, ActionId> ids;
  for (const auto& state : model.states) {
    for (const auto& element : model.available(state)) {
      const auto id = catalog.find(element);
      if (!id) throw IntegrityError("GUI action " + format_signature(element) + " is missing from the catalog");
      ids[element] = *id;
    }
  }

  Rng explore_rng(derive_seed(policy.seed, 0));
  Rng choice_rng(derive_seed(policy.seed, 1));
  Rng weighted_rng(derive_seed(policy.seed, 2));
  const bool guided = policy.kind == PolicyKind::recommender_guided;
  auto cursor = guided ? recommender->start_session() : nullptr;

  EpisodeState episode = EpisodeState::start(model);
  EpisodeStats stats;
  std::vector<double> weights;
  for (std::size_t t = 0; t < policy.max_steps; ++t) {
    const auto available = model.available(episode.state);
    if (available.empty()) {
      stats.ended_early = true;
      break;
    }

    std::size_t choice = available.size();
    if (guided && !explore_rng.bernoulli(policy.epsilon)) {
      const auto ranked = cursor->rank(policy.top_k);
      weights.assign(available.size(), 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < available.size(); ++i) {
        const ActionId id = ids.at(available[i]);
        for (const auto& entry : ranked) {
          if (entry.action == id) {
            weights[i] = std::max(entry.score, 0.0);
            total += weights[i];
            break;
          }
        }
      }
      if (total > 0.0) choice = weighted_rng.weighted_index(weights);
    }
    if (choice == available.size()) choice = choice_rng.uniform_index(available.size());

    const ActionSignature action = available[choice];
    step(model, episode, action);
    const ActionId id = ids.at(action);
    stats.actions_taken.push_back(id);
    if (cursor && id <= recommender->n_actions()) cursor->observe(id);
  }
  stats.steps = stats.actions_taken.size();
  stats.unique_states_visited = episode.visited.size();
  stats.gates_passed = episode.gates_passed;
  stats.gate_attempts_blocked = episode.gate_attempts_blocked;
  return stats;
}

std::vector<EpisodeStats> run_episodes(const GuiModel& model, const Recommender* recommender,
                                       const GeneratorPolicy& policy, const ActionCatalog& catalog,
                                       std::size_t episodes) {
  std::vector<EpisodeStats> out;
  out.reserve(episodes);
  for (std::size_t e = 0; e < episodes; ++e) {
    GeneratorPolicy episode_policy = policy;
    episode_policy.seed = derive_seed(policy.seed, e);
    out.push_back(generate_test(model, recommender, episode_policy, catalog));
  }
  return out;
}

EpisodeSummary summarize(std::span<const EpisodeStats> episodes) {
  EpisodeSummary summary;
  summary.episodes = episodes.size();
  if (episodes.empty()) return summary;
  std::size_t passing = 0;
  for (const auto& e : episodes) {
    if (e.gates_passed > 0) ++passing;
    summary.mean_unique_states += static_cast<double>(e.unique_states_visited);
    summary.mean_gates_passed += static_cast<double>(e.gates_passed);
    summary.mean_gates_blocked += static_cast<double>(e.gate_attempts_blocked);
  }
  const auto n = static_cast<double>(episodes.size());
  summary.gate_pass_rate = static_cast<double>(passing) / n;
  summary.mean_unique_states /= n;
  summary.mean_gates_passed /= n;
  summary.mean_gates_blocked /= n;
  return summary;
}

void write_episode_csv(std::ostream& out, std::span<const EpisodeStats> episodes) {
  out << "episode,steps,unique_states,gates_passed,gates_blocked\n";
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& s = episodes[e];
    out << e + 1 << ',' << s.steps << ',' << s.unique_states_visited << ',' << s.gates_passed << ','
        << s.gate_attempts_blocked << '\n';
  }
}

}  // namespace guirec
