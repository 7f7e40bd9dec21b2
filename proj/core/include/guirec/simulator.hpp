#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "guirec/catalog.hpp"
#include "guirec/gui_model.hpp"
#include "guirec/recommender.hpp"

namespace guirec {

enum class StepKind { moved, blocked, no_op };

struct StepOutcome {
  StepKind kind = StepKind::no_op;
  std::string state;  // state after the step
};

// Mutable state of one episode against a GuiModel.
struct EpisodeState {
  std::string state;
  std::vector<ActionSignature> history;  // attempted interactions (moves and blocked attempts)
  std::set<std::string> visited;
  std::size_t gates_passed = 0;
  std::size_t gate_attempts_blocked = 0;

  static EpisodeState start(const GuiModel& model);
};

// True when `required` occurs in `history` in order (not necessarily contiguously).
bool is_subsequence(std::span<const ActionSignature> required, std::span<const ActionSignature> history);

// Applies one action. Absent actions are no-ops and leave the episode
// untouched; a gated transition whose prefix is missing is blocked and
// recorded; anything else moves (possibly to the same state).
StepOutcome step(const GuiModel& model, EpisodeState& episode, const ActionSignature& action);

struct Script {
  std::string name;
  std::vector<ActionSignature> steps;
};

// Bundled-script text format:
//
//   guiscripts 1
//   fragment <name>
//     <state> <action_type> <locator>
//   end
//   script <name>: <fragment> <fragment> ...
std::vector<Script> parse_scripts(std::string_view text);

// Replays scripts against the model as recorded user sessions. Script i gets
// session key "script-<i>" (1-based, zero padded), starts at
// base_timestamp + 600·i and advances 3 s per event. Typed actions carry
// placeholder input. Throws ValidationError naming the script and step index
// when a step is absent or blocked in the current state.
std::vector<RawEvent> script_events(const GuiModel& model, std::span<const Script> scripts,
                                    std::int64_t base_timestamp = 1568573073);

// script_events followed by ingest_events against `catalog`.
SessionLog record_scripted_sessions(const GuiModel& model, std::span<const Script> scripts, ActionCatalog catalog,
                                    std::int64_t base_timestamp = 1568573073);

enum class PolicyKind { random_monkey, recommender_guided };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);

struct GeneratorPolicy {
  PolicyKind kind = PolicyKind::random_monkey;
  double epsilon = 0.1;
  std::size_t top_k = 10;
  std::size_t max_steps = 30;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpisodeStats {
  std::vector<ActionId> actions_taken;
  std::size_t steps = 0;
  std::size_t unique_states_visited = 0;
  std::size_t gates_passed = 0;
  std::size_t gate_attempts_blocked = 0;
  bool ended_early = false;  // reached a state without available actions
};

// Runs one episode of up to max_steps actions from the initial state.
//
// random_monkey picks uniformly among the current state's actions.
// recommender_guided explores uniformly with probability epsilon; otherwise
// it intersects the recommender's top_k with the available actions and
// samples in proportion to the recommender's score, falling back to uniform
// when the intersection carries no weight. Draws come from three streams
// derived from policy.seed (exploration, uniform choice, weighted choice),
// so epsilon = 1 reproduces the monkey's episode exactly.
//
// Every model action must be in `catalog`; the recommender observes each
// attempted action it knows about.
EpisodeStats generate_test(const GuiModel& model, const Recommender* recommender, const GeneratorPolicy& policy,
                           const ActionCatalog& catalog);

// Episode e (0-based) runs with seed derive_seed(policy.seed, e).
std::vector<EpisodeStats> run_episodes(const GuiModel& model, const Recommender* recommender,
                                       const GeneratorPolicy& policy, const ActionCatalog& catalog,
                                       std::size_t episodes);

struct EpisodeSummary {
  std::size_t episodes = 0;
  double gate_pass_rate = 0.0;  // fraction of episodes passing at least one gate
  double mean_unique_states = 0.0;
  double mean_gates_passed = 0.0;
  double mean_gates_blocked = 0.0;
};

EpisodeSummary summarize(std::span<const EpisodeStats> episodes);

// CSV: episode,steps,unique_states,gates_passed,gates_blocked
void write_episode_csv(std::ostream& out, std::span<const EpisodeStats> episodes);

}  // namespace guirec
