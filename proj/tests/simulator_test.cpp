#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <sstream>

#include "guirec/bundled_data.hpp"
#include "guirec/errors.hpp"
#include "guirec/session_io.hpp"
#include "guirec/simulator.hpp"
#include "guirec/table_recommender.hpp"
#include "test_support.hpp"

using namespace guirec;

namespace {

const char* kGateModel = R"(guimodel 1
initial /form
state /form
state /done
action /form type_text //a
action /form type_text //b
action /form type_text //c
action /form click //noise
action /form click //submit -> /done
action /done click //back -> /form
gate /form click //submit
  requires /form type_text //a
  requires /form type_text //b
  requires /form type_text //c
)";

ActionSignature sig(const std::string& loc, ActionType t = ActionType::type_text) { return {"/form", loc, t}; }

const ActionSignature kSubmit{"/form", "//submit", ActionType::click};

GuiModel mini_hub() { return load_gui_model(bundled::mini_hub_model()); }

ActionCatalog mini_hub_catalog() {
  ActionCatalog c;
  register_gui_actions(mini_hub(), c);
  return c;
}

}  // namespace

TEST(Gate, OnlyTheDeclaredOrderPasses) {
  const auto model = load_gui_model(kGateModel);
  std::array<std::string, 3> order{"//a", "//b", "//c"};
  std::size_t passing = 0;
  do {
    auto ep = EpisodeState::start(model);
    for (const auto& loc : order) step(model, ep, sig(loc));
    const auto outcome = step(model, ep, kSubmit);
    const bool identity = order == std::array<std::string, 3>{"//a", "//b", "//c"};
    EXPECT_EQ(outcome.kind == StepKind::moved, identity) << order[0] << order[1] << order[2];
    passing += outcome.kind == StepKind::moved;
  } while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(passing, 1u);
}

TEST(Gate, PrefixNeedNotBeContiguous) {
  const auto model = load_gui_model(kGateModel);
  auto ep = EpisodeState::start(model);
  const ActionSignature noise{"/form", "//noise", ActionType::click};
  for (const auto& a : {sig("//c"), sig("//a"), noise, sig("//b"), noise, sig("//a"), sig("//c")}) step(model, ep, a);
  EXPECT_EQ(step(model, ep, kSubmit).kind, StepKind::moved);
  EXPECT_EQ(ep.state, "/done");
  EXPECT_EQ(ep.gates_passed, 1u);
}

TEST(Gate, SubsequenceCheck) {
  const std::vector<ActionSignature> req{sig("//a"), sig("//b")};
  EXPECT_TRUE(is_subsequence(req, std::vector<ActionSignature>{sig("//a"), sig("//c"), sig("//b")}));
  EXPECT_FALSE(is_subsequence(req, std::vector<ActionSignature>{sig("//b"), sig("//a")}));
  EXPECT_TRUE(is_subsequence({}, std::vector<ActionSignature>{}));
}

TEST(Step, LoginGateOnMiniHub) {
  const auto model = mini_hub();
  auto ep = EpisodeState::start(model);
  const ActionSignature submit{"/login", "//input[@name='commit']", ActionType::click};
  auto out = step(model, ep, submit);
  EXPECT_EQ(out.kind, StepKind::blocked);
  EXPECT_EQ(ep.state, "/login");
  EXPECT_EQ(ep.gate_attempts_blocked, 1u);

  for (const auto& s : model.gate_for(submit)->required_prefix) EXPECT_EQ(step(model, ep, s).kind, StepKind::moved);
  out = step(model, ep, submit);
  EXPECT_EQ(out.kind, StepKind::moved);
  EXPECT_EQ(out.state, "/dashboard");
  EXPECT_EQ(ep.visited.size(), 2u);
}

TEST(Step, AbsentActionIsNoOp) {
  const auto model = mini_hub();
  auto ep = EpisodeState::start(model);
  const auto before = ep.history.size();
  const ActionSignature elsewhere{"/repo", "//a[@id='issues-tab']", ActionType::click};
  EXPECT_EQ(step(model, ep, elsewhere).kind, StepKind::no_op);
  EXPECT_EQ(step(model, ep, {"/login", "//nothing", ActionType::click}).kind, StepKind::no_op);
  EXPECT_EQ(ep.state, "/login");
  EXPECT_EQ(ep.history.size(), before);
}

TEST(Scripts, BundledScriptsReplay) {
  const auto scripts = parse_scripts(bundled::mini_hub_scripts());
  ASSERT_EQ(scripts.size(), 50u);
  const auto log = record_scripted_sessions(mini_hub(), scripts, mini_hub_catalog());
  ASSERT_EQ(log.sessions.size(), 50u);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(log.sessions[i].action_ids.size(), scripts[i].steps.size());
  EXPECT_NO_THROW(validate(log));

  // Skew: the five most frequent IDs cover at least 30 % of events.
  std::map<ActionId, std::size_t> counts;
  for (const auto& s : log.sessions)
    for (auto id : s.action_ids) ++counts[id];
  std::vector<std::size_t> freq;
  for (const auto& [id, c] : counts) freq.push_back(c);
  std::sort(freq.rbegin(), freq.rend());
  const double top5 = static_cast<double>(freq[0] + freq[1] + freq[2] + freq[3] + freq[4]);
  EXPECT_GE(top5 / static_cast<double>(log.total_actions()), 0.30);

  EXPECT_EQ(record_scripted_sessions(mini_hub(), scripts, mini_hub_catalog()), log);
}

TEST(Scripts, FiveStepLoginScript) {
  const auto scripts = parse_scripts(R"(guiscripts 1
fragment login
  /login click //div[@id='cookie-banner']/button[1]
  /login type_text //input[@id='login_field']
  /login type_text //input[@id='password']
  /login click //input[@name='commit']
end
fragment repo
  /dashboard click //div[@id='repos']/ul/li[1]/a
end
script one: login repo
)");
  ASSERT_EQ(scripts.size(), 1u);
  const auto log = record_scripted_sessions(mini_hub(), scripts, mini_hub_catalog());
  ASSERT_EQ(log.sessions.size(), 1u);
  EXPECT_EQ(log.sessions[0].action_ids.size(), 5u);
  EXPECT_EQ(log.sessions[0].start_timestamp, 1568573073);
}

TEST(Scripts, RoundTripThroughCsv) {
  const auto scripts = parse_scripts(bundled::mini_hub_scripts());
  const auto events = script_events(mini_hub(), scripts);
  std::ostringstream ev;
  write_events_csv(ev, events);
  std::istringstream in(ev.str());
  EXPECT_EQ(read_events_csv(in), events);

  const auto log = record_scripted_sessions(mini_hub(), scripts, mini_hub_catalog());
  std::ostringstream s, c;
  write_session_csv(log, s, c);
  std::istringstream si(s.str()), ci(c.str());
  EXPECT_EQ(read_session_csv(si, ci), log);
}

TEST(Scripts, InvalidStepNamesScriptAndIndex) {
  const auto scripts = parse_scripts(R"(guiscripts 1
fragment skip_login
  /login click //div[@id='cookie-banner']/button[1]
  /login click //input[@name='commit']
end
script broken: skip_login
)");
  try {
    record_scripted_sessions(mini_hub(), scripts, mini_hub_catalog());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("broken"), std::string::npos);
    EXPECT_NE(what.find("step 2"), std::string::npos);
  }
}

TEST(Scripts, ParseErrors) {
  EXPECT_THROW(parse_scripts("guiscripts 2\n"), ParseError);
  EXPECT_THROW(parse_scripts("guiscripts 1\nscript x: nope\n"), ParseError);
  EXPECT_THROW(parse_scripts("guiscripts 1\nfragment a\n/p click //x\n"), ParseError);
  EXPECT_THROW(parse_scripts("guiscripts 1\nfragment a\nnot-a-signature\nend\n"), ParseError);
  EXPECT_THROW(parse_scripts("guiscripts 1\nfragment a\nend\nfragment a\nend\n"), ParseError);
}

TEST(Generator, EpsilonOneEqualsMonkey) {
  const auto model = mini_hub();
  const auto catalog = mini_hub_catalog();
  const TransitionTable table(catalog.size());
  GeneratorPolicy monkey;
  monkey.seed = 12;
  GeneratorPolicy guided = monkey;
  guided.kind = PolicyKind::recommender_guided;
  guided.epsilon = 1.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    monkey.seed = guided.seed = s;
    EXPECT_EQ(generate_test(model, nullptr, monkey, catalog).actions_taken,
              generate_test(model, &table, guided, catalog).actions_taken);
  }
}

TEST(Generator, DeterministicAndWellFormed) {
  const auto model = mini_hub();
  const auto catalog = mini_hub_catalog();
  const auto scripted = record_scripted_sessions(model, parse_scripts(bundled::mini_hub_scripts()), catalog);
  const auto table = fit_transition_table(scripted);
  GeneratorPolicy policy;
  policy.kind = PolicyKind::recommender_guided;
  policy.seed = 5;
  const auto a = run_episodes(model, &table, policy, catalog, 20);
  const auto b = run_episodes(model, &table, policy, catalog, 20);
  for (std::size_t e = 0; e < a.size(); ++e) {
    EXPECT_EQ(a[e].actions_taken, b[e].actions_taken);
    EXPECT_EQ(a[e].steps, 30u);

    // Replaying the emitted actions reproduces the counters, and every
    // action was available where it was taken.
    auto ep = EpisodeState::start(model);
    for (auto id : a[e].actions_taken) {
      const auto& action = catalog.signature(id);
      const auto avail = model.available(ep.state);
      ASSERT_NE(std::find(avail.begin(), avail.end(), action), avail.end());
      EXPECT_NE(step(model, ep, action).kind, StepKind::no_op);
    }
    EXPECT_EQ(ep.gates_passed, a[e].gates_passed);
    EXPECT_EQ(ep.gate_attempts_blocked, a[e].gate_attempts_blocked);
    EXPECT_EQ(ep.visited.size(), a[e].unique_states_visited);
  }
}

TEST(Generator, DeadEndEndsEarly) {
  GuiModel model = load_gui_model("guimodel 1\ninitial /a\nstate /a\nstate /b\naction /a click //go -> /b\n");
  ActionCatalog catalog;
  register_gui_actions(model, catalog);
  const auto stats = generate_test(model, nullptr, GeneratorPolicy{}, catalog);
  EXPECT_TRUE(stats.ended_early);
  EXPECT_EQ(stats.steps, 1u);
  EXPECT_EQ(stats.unique_states_visited, 2u);
}

TEST(Generator, Misconfiguration) {
  const auto model = mini_hub();
  GeneratorPolicy guided;
  guided.kind = PolicyKind::recommender_guided;
  EXPECT_THROW(generate_test(model, nullptr, guided, mini_hub_catalog()), ConfigError);
  EXPECT_THROW(generate_test(model, nullptr, GeneratorPolicy{}, ActionCatalog{}), IntegrityError);
  GeneratorPolicy bad;
  bad.epsilon = 2.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_EQ(parse_policy_kind("monkey"), PolicyKind::random_monkey);
  EXPECT_EQ(parse_policy_kind("recommender_guided"), PolicyKind::recommender_guided);
  EXPECT_THROW(parse_policy_kind("smart"), ConfigError);
}

TEST(Generator, SummaryAndCsv) {
  std::vector<EpisodeStats> eps(2);
  eps[0].steps = 30;
  eps[0].unique_states_visited = 3;
  eps[0].gates_passed = 1;
  eps[1].steps = 30;
  eps[1].unique_states_visited = 1;
  eps[1].gate_attempts_blocked = 4;
  const auto s = summarize(eps);
  EXPECT_DOUBLE_EQ(s.gate_pass_rate, 0.5);
  EXPECT_DOUBLE_EQ(s.mean_unique_states, 2.0);
  EXPECT_DOUBLE_EQ(s.mean_gates_blocked, 2.0);
  std::ostringstream out;
  write_episode_csv(out, eps);
  EXPECT_EQ(out.str(), "episode,steps,unique_states,gates_passed,gates_blocked\n1,30,3,1,0\n2,30,1,0,4\n");
}
