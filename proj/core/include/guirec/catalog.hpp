#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace guirec {

// Dense action identifier; valid IDs start at 1.
using ActionId = std::uint32_t;

enum class ActionType { click, type_text, select, navigate, submit, other };

std::string_view to_string(ActionType type);
// Throws ValidationError for an unknown name.
ActionType parse_action_type(std::string_view name);

struct RawEvent {
  std::string session_key;
  std::int64_t timestamp = 0;
  std::string page;
  std::string element_locator;
  ActionType action_type = ActionType::click;
  std::optional<std::string> input_data;

  bool operator==(const RawEvent&) const = default;
};

// What an action ID stands for. Typed input is deliberately not part of it.
struct ActionSignature {
  std::string page;
  std::string element_locator;
  ActionType action_type = ActionType::click;

  auto operator<=>(const ActionSignature&) const = default;
};

// Strips the query string and fragment from a page URL or path.
std::string normalize_page(std::string_view page);

// Bijection between action signatures and dense IDs 1..size(), assigned in
// first-seen order.
class ActionCatalog {
 public:
  // Returns the signature's ID, minting the next dense ID if it is new.
  ActionId intern(const ActionSignature& signature);

  std::optional<ActionId> find(const ActionSignature& signature) const;

  // Throws std::out_of_range for IDs outside 1..size().
  const ActionSignature& signature(ActionId id) const;

  bool contains(ActionId id) const noexcept { return id >= 1 && id <= signatures_.size(); }
  std::size_t size() const noexcept { return signatures_.size(); }
  bool empty() const noexcept { return signatures_.empty(); }

  // Signatures ordered by ID (index 0 holds ID 1).
  std::span<const ActionSignature> signatures() const noexcept { return signatures_; }

  bool operator==(const ActionCatalog& other) const { return signatures_ == other.signatures_; }

 private:
  std::map<ActionSignature, ActionId> ids_;
  std::vector<ActionSignature> signatures_;
};

// Validates the event, builds its signature (normalized page, input ignored)
// and interns it. Throws ValidationError naming the offending field.
ActionId derive_action_id(ActionCatalog& catalog, const RawEvent& event);

// Signature an event maps to, after validation and page normalization.
ActionSignature signature_of(const RawEvent& event);

struct Session {
  std::uint64_t session_id = 0;
  std::vector<ActionId> action_ids;
  std::int64_t start_timestamp = 0;

  bool operator==(const Session&) const = default;
};

struct SessionLog {
  std::vector<Session> sessions;
  ActionCatalog catalog;

  std::size_t total_actions() const;
  bool operator==(const SessionLog&) const = default;
};

// Groups events by session key, orders each group by timestamp (stable for
// ties), orders sessions by start timestamp (then session key) and maps every
// event through derive_action_id. Sessions are numbered 1..K. `seed_catalog`
// supplies pre-existing IDs; new signatures are appended after it.
SessionLog ingest_events(std::span<const RawEvent> rows, ActionCatalog seed_catalog = {});

// Checks the SessionLog invariants (non-empty sessions, known IDs, unique
// ascending session IDs, non-decreasing start timestamps). Throws IntegrityError.
void validate(const SessionLog& log);

// Appends `extra`'s sessions to `base`, renumbering them after base's last
// session ID. base's catalog must be a prefix of extra's; the result adopts
// extra's catalog.
void append_sessions(SessionLog& base, const SessionLog& extra);

}  // namespace guirec
