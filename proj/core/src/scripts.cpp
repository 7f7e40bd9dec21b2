#include <map>
#include <sstream>

#include "guirec/errors.hpp"
#include "guirec/simulator.hpp"

namespace guirec {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<Script> parse_scripts(std::string_view text) {
  std::map<std::string, std::vector<ActionSignature>, std::less<>> fragments;
  std::vector<Script> scripts;
  std::vector<ActionSignature>* open_fragment = nullptr;
  bool header = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    try {
      if (!header) {
        if (line != "guiscripts 1") throw ParseError("expected header 'guiscripts 1'", line_no);
        header = true;
      } else if (open_fragment) {
        if (line == "end") {
          open_fragment = nullptr;
        } else {
          open_fragment->push_back(parse_signature(line));
        }
      } else if (line.starts_with("fragment ")) {
        const auto name = std::string(trim(line.substr(9)));
        if (name.empty()) throw ParseError("fragment needs a name", line_no);
        auto [it, inserted] = fragments.try_emplace(name);
        if (!inserted) throw ParseError("duplicate fragment '" + name + "'", line_no);
        open_fragment = &it->second;
      } else if (line.starts_with("script ")) {
        auto rest = line.substr(7);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) throw ParseError("expected 'script <name>: <fragments>'", line_no);
        Script script;
        script.name = std::string(trim(rest.substr(0, colon)));
        std::istringstream parts{std::string(rest.substr(colon + 1))};
        std::string fragment;
        while (parts >> fragment) {
          auto it = fragments.find(fragment);
          if (it == fragments.end()) throw ParseError("unknown fragment '" + fragment + "'", line_no);
          script.steps.insert(script.steps.end(), it->second.begin(), it->second.end());
        }
        if (script.name.empty() || script.steps.empty()) throw ParseError("script needs a name and steps", line_no);
        scripts.push_back(std::move(script));
      } else {
        throw ParseError("unexpected line", line_no);
      }
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (open_fragment) throw ParseError("unterminated fragment", line_no);
  return scripts;
}

}  // namespace guirec
