#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "guirec/catalog.hpp"

namespace guirec {

// A transition that only fires once `required_prefix` occurred, in order
// but not necessarily contiguously, earlier in the episode.
struct GateRule {
  ActionSignature action;  // action.page is the source state
  std::vector<ActionSignature> required_prefix;
};

// Declarative stand-in for a GUI under test. States are page identifiers;
// every element of a state is an ActionSignature whose page is that state.
struct GuiModel {
  std::string initial_state;
  std::vector<std::string> states;                              // declaration order
  std::map<std::string, std::vector<ActionSignature>> elements;  // per state, declaration order
  std::map<ActionSignature, std::string> transitions;           // element -> target state
  std::vector<GateRule> gates;

  bool has_state(std::string_view state) const;
  std::span<const ActionSignature> available(const std::string& state) const;
  const GateRule* gate_for(const ActionSignature& action) const;

  // Throws ValidationError when an invariant does not hold.
  void validate() const;
};

// Text format, one directive per line, '#' starts a comment:
//
//   guimodel 1
//   initial <state>
//   state <state>
//   action <state> <action_type> <locator> [-> <target state>]
//   gate <state> <action_type> <locator>
//     requires <state> <action_type> <locator>     (one or more, in order)
//
// States are single tokens; locators run to the end of the line or to " -> ".
// An action without "->" keeps the current state. Errors carry the line
// number (ParseError) or name the offending state or action (ValidationError).
GuiModel load_gui_model(std::istream& in);
GuiModel load_gui_model(std::string_view text);
GuiModel load_gui_model_file(const std::filesystem::path& path);

// Parses "<state> <action_type> <locator>".
ActionSignature parse_signature(std::string_view text);
std::string format_signature(const ActionSignature& signature);

// Interns every element of the model into the catalog in declaration order.
void register_gui_actions(const GuiModel& model, ActionCatalog& catalog);

}  // namespace guirec
