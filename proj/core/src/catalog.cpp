#include "guirec/catalog.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "guirec/errors.hpp"

namespace guirec {

namespace {

constexpr std::array<std::string_view, 6> kActionTypeNames = {
    "click", "type_text", "select", "navigate", "submit", "other"};

}  // namespace

std::string_view to_string(ActionType type) {
  return kActionTypeNames.at(static_cast<std::size_t>(type));
}

ActionType parse_action_type(std::string_view name) {
  for (std::size_t i = 0; i < kActionTypeNames.size(); ++i) {
    if (kActionTypeNames[i] == name) return static_cast<ActionType>(i);
  }
  throw ValidationError("unknown action_type '" + std::string(name) + "'");
}

std::string normalize_page(std::string_view page) {
  const auto cut = page.find_first_of("?#");
  return std::string(page.substr(0, cut));
}

ActionId ActionCatalog::intern(const ActionSignature& signature) {
  auto [it, inserted] = ids_.try_emplace(signature, static_cast<ActionId>(signatures_.size() + 1));
  if (inserted) signatures_.push_back(signature);
  return it->second;
}

std::optional<ActionId> ActionCatalog::find(const ActionSignature& signature) const {
  auto it = ids_.find(signature);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const ActionSignature& ActionCatalog::signature(ActionId id) const {
  if (!contains(id)) {
    throw std::out_of_range("action ID " + std::to_string(id) + " not in catalog of size " +
                            std::to_string(signatures_.size()));
  }
  return signatures_[id - 1];
}

ActionSignature signature_of(const RawEvent& event) {
  if (event.timestamp < 0) throw ValidationError("event field 'timestamp' must be >= 0");
  if (event.page.empty()) throw ValidationError("event field 'page' is empty");
  ActionSignature signature{normalize_page(event.page), event.element_locator, event.action_type};
  if (signature.page.empty()) throw ValidationError("event field 'page' is empty after normalization");
  if (signature.element_locator.empty()) {
    if (event.action_type != ActionType::navigate) {
      throw ValidationError("event field 'element_locator' is empty");
    }
    signature.element_locator = signature.page;
  }
  return signature;
}

ActionId derive_action_id(ActionCatalog& catalog, const RawEvent& event) {
  return catalog.intern(signature_of(event));
}

std::size_t SessionLog::total_actions() const {
  return std::accumulate(sessions.begin(), sessions.end(), std::size_t{0},
                         [](std::size_t acc, const Session& s) { return acc + s.action_ids.size(); });
}

SessionLog ingest_events(std::span<const RawEvent> rows, ActionCatalog seed_catalog) {
  // Validate everything up front so a bad row never leaves a half-built catalog.
  for (const auto& row : rows) (void)signature_of(row);

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) groups[rows[i].session_key].push_back(i);

  struct Group {
    const std::string* key;
    std::vector<std::size_t> events;
    std::int64_t start;
  };
  std::vector<Group> ordered;
  ordered.reserve(groups.size());
  for (auto& [key, indices] : groups) {
    std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      return rows[a].timestamp < rows[b].timestamp;
    });
    ordered.push_back({&key, std::move(indices), 0});
    ordered.back().start = rows[ordered.back().events.front()].timestamp;
  }
  std::sort(ordered.begin(), ordered.end(), [](const Group& a, const Group& b) {
    if (a.start != b.start) return a.start < b.start;
    return *a.key < *b.key;
  });

  SessionLog log;
  log.catalog = std::move(seed_catalog);
  log.sessions.reserve(ordered.size());
  std::uint64_t next_id = 1;
  for (const auto& group : ordered) {
    Session session;
    session.session_id = next_id++;
    session.start_timestamp = group.start;
    session.action_ids.reserve(group.events.size());
    for (std::size_t index : group.events) {
      session.action_ids.push_back(derive_action_id(log.catalog, rows[index]));
    }
    log.sessions.push_back(std::move(session));
  }
  return log;
}

void validate(const SessionLog& log) {
  std::uint64_t previous_id = 0;
  std::int64_t previous_start = std::numeric_limits<std::int64_t>::min();
  for (const auto& session : log.sessions) {
    const std::string where = "session " + std::to_string(session.session_id);
    if (session.session_id <= previous_id) {
      throw IntegrityError(where + ": session IDs must be unique and ascending");
    }
    if (session.start_timestamp < previous_start) {
      throw IntegrityError(where + ": start timestamps must be non-decreasing in session order");
    }
    if (session.action_ids.empty()) throw IntegrityError(where + ": empty action sequence");
    for (ActionId id : session.action_ids) {
      if (!log.catalog.contains(id)) {
        throw IntegrityError(where + ": unknown action ID " + std::to_string(id));
      }
    }
    previous_id = session.session_id;
    previous_start = session.start_timestamp;
  }
}

void append_sessions(SessionLog& base, const SessionLog& extra) {
  const auto base_signatures = base.catalog.signatures();
  const auto extra_signatures = extra.catalog.signatures();
  if (base_signatures.size() > extra_signatures.size() ||
      !std::equal(base_signatures.begin(), base_signatures.end(), extra_signatures.begin())) {
    throw IntegrityError("append_sessions: base catalog is not a prefix of the appended log's catalog");
  }
  std::uint64_t next_id = base.sessions.empty() ? 1 : base.sessions.back().session_id + 1;
  for (const auto& session : extra.sessions) {
    Session copy = session;
    copy.session_id = next_id++;
    base.sessions.push_back(std::move(copy));
  }
  base.catalog = extra.catalog;
}

}  // namespace guirec
