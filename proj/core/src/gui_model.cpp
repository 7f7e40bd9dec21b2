#include "guirec/gui_model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "guirec/errors.hpp"

namespace guirec {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits off the first whitespace-delimited token.
std::string_view take_token(std::string_view& s) {
  s = trim(s);
  const auto end = s.find_first_of(" \t");
  auto token = s.substr(0, end);
  s = end == std::string_view::npos ? std::string_view{} : trim(s.substr(end));
  return token;
}

}  // namespace

bool GuiModel::has_state(std::string_view state) const {
  return std::find(states.begin(), states.end(), state) != states.end();
}

std::span<const ActionSignature> GuiModel::available(const std::string& state) const {
  auto it = elements.find(state);
  if (it == elements.end()) return {};
  return it->second;
}

const GateRule* GuiModel::gate_for(const ActionSignature& action) const {
  for (const auto& gate : gates) {
    if (gate.action == action) return &gate;
  }
  return nullptr;
}

void GuiModel::validate() const {
  if (states.empty()) throw ValidationError("GUI model declares no states");
  if (!has_state(initial_state)) throw ValidationError("initial state '" + initial_state + "' is not declared");
  for (const auto& [state, list] : elements) {
    if (!has_state(state)) throw ValidationError("elements for undeclared state '" + state + "'");
    for (const auto& e : list) {
      if (e.page != state) throw ValidationError("element " + format_signature(e) + " listed under '" + state + "'");
    }
  }
  for (const auto& [action, target] : transitions) {
    const auto list = available(action.page);
    if (std::find(list.begin(), list.end(), action) == list.end()) {
      throw ValidationError("transition " + format_signature(action) + " is not an element of its source state");
    }
    if (!has_state(target)) {
      throw ValidationError("transition " + format_signature(action) + " targets undeclared state '" + target + "'");
    }
  }
  for (const auto& gate : gates) {
    if (!transitions.count(gate.action)) {
      throw ValidationError("gate on " + format_signature(gate.action) + " does not guard a declared transition");
    }
    if (gate.required_prefix.empty()) {
      throw ValidationError("gate on " + format_signature(gate.action) + " has no required prefix");
    }
    for (const auto& required : gate.required_prefix) {
      if (!transitions.count(required)) {
        throw ValidationError("gate on " + format_signature(gate.action) + " requires unknown action " +
                              format_signature(required));
      }
    }
  }
}

ActionSignature parse_signature(std::string_view text) {
  std::string_view rest = text;
  const auto state = take_token(rest);
  const auto type = take_token(rest);
  if (state.empty() || type.empty() || rest.empty()) {
    throw ValidationError("expected '<state> <action_type> <locator>', got '" + std::string(trim(text)) + "'");
  }
  return {std::string(state), std::string(rest), parse_action_type(type)};
}

std::string format_signature(const ActionSignature& s) {
  return s.page + " " + std::string(to_string(s.action_type)) + " " + s.element_locator;
}

GuiModel load_gui_model(std::istream& in) {
  struct PendingAction {
    ActionSignature action;
    std::string target;
    std::size_t line;
  };
  struct PendingGate {
    GateRule rule;
    std::size_t line;
    std::vector<std::size_t> requires_lines;
  };

  GuiModel model;
  std::vector<PendingAction> actions;
  std::vector<PendingGate> gates;
  std::size_t initial_line = 0;
  bool header = false;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos && (hash == 0 || line[hash - 1] == ' ' || line[hash - 1] == '\t')) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    std::string_view rest = line;
    const auto directive = take_token(rest);
    try {
      if (!header) {
        if (directive != "guimodel" || rest != "1") throw ParseError("expected header 'guimodel 1'", line_no);
        header = true;
      } else if (directive == "initial") {
        if (rest.empty()) throw ParseError("'initial' needs a state", line_no);
        model.initial_state = std::string(rest);
        initial_line = line_no;
      } else if (directive == "state") {
        if (rest.empty() || rest.find_first_of(" \t") != std::string_view::npos) {
          throw ParseError("'state' needs exactly one token", line_no);
        }
        if (model.has_state(rest)) throw ParseError("duplicate state '" + std::string(rest) + "'", line_no);
        model.states.emplace_back(rest);
      } else if (directive == "action") {
        std::string target;
        if (const auto arrow = rest.find(" -> "); arrow != std::string_view::npos) {
          target = std::string(trim(rest.substr(arrow + 4)));
          rest = rest.substr(0, arrow);
          if (target.empty()) throw ParseError("missing target after '->'", line_no);
        }
        auto action = parse_signature(rest);
        if (target.empty()) target = action.page;
        actions.push_back({std::move(action), std::move(target), line_no});
      } else if (directive == "gate") {
        gates.push_back({{parse_signature(rest), {}}, line_no, {}});
      } else if (directive == "requires") {
        if (gates.empty()) throw ParseError("'requires' outside a gate", line_no);
        gates.back().rule.required_prefix.push_back(parse_signature(rest));
        gates.back().requires_lines.push_back(line_no);
      } else {
        throw ParseError("unknown directive '" + std::string(directive) + "'", line_no);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!header) throw ValidationError("empty GUI model");
  if (model.states.empty()) throw ValidationError("GUI model declares no states");
  if (model.initial_state.empty()) throw ValidationError("GUI model has no 'initial' directive");
  if (!model.has_state(model.initial_state)) {
    throw ParseError("initial state '" + model.initial_state + "' is not declared", initial_line);
  }

  for (auto& pending : actions) {
    const auto& a = pending.action;
    if (!model.has_state(a.page)) throw ParseError("action in unknown state '" + a.page + "'", pending.line);
    if (!model.has_state(pending.target)) {
      throw ParseError("dangling transition target '" + pending.target + "'", pending.line);
    }
    auto& list = model.elements[a.page];
    if (std::find(list.begin(), list.end(), a) != list.end()) {
      throw ParseError("duplicate action " + format_signature(a), pending.line);
    }
    list.push_back(a);
    model.transitions[a] = pending.target;
  }
  for (auto& pending : gates) {
    if (!model.transitions.count(pending.rule.action)) {
      throw ParseError("gate on undeclared action " + format_signature(pending.rule.action), pending.line);
    }
    if (pending.rule.required_prefix.empty()) throw ParseError("gate without 'requires' lines", pending.line);
    if (model.gate_for(pending.rule.action)) throw ParseError("second gate on the same action", pending.line);
    for (std::size_t i = 0; i < pending.rule.required_prefix.size(); ++i) {
      const auto& req = pending.rule.required_prefix[i];
      if (!model.transitions.count(req)) {
        throw ParseError("gate requires unknown action " + format_signature(req), pending.requires_lines[i]);
      }
    }
    model.gates.push_back(std::move(pending.rule));
  }
  model.validate();
  return model;
}

GuiModel load_gui_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_gui_model(in);
}

GuiModel load_gui_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open GUI model '" + path.string() + "'");
  return load_gui_model(in);
}

void register_gui_actions(const GuiModel& model, ActionCatalog& catalog) {
  for (const auto& state : model.states) {
    for (const auto& element : model.available(state)) catalog.intern(element);
  }
}

}  // namespace guirec
