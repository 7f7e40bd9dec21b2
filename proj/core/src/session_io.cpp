#include "guirec/session_io.hpp"

#include <charconv>
#include <fstream>
#include <limits>

#include "guirec/csv.hpp"
#include "guirec/errors.hpp"

namespace guirec {

namespace {

template <typename Int>
Int parse_int(std::string_view text, std::string_view field, std::size_t line) {
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError("field '" + std::string(field) + "': invalid integer '" + std::string(text) + "'", line);
  }
  return value;
}

bool is_blank(const csv::Record& record) {
  return record.fields.size() == 1 && record.fields[0].empty();
}

void require_columns(const csv::Record& record, std::size_t count) {
  if (record.fields.size() != count) {
    throw ParseError("expected " + std::to_string(count) + " columns, found " +
                         std::to_string(record.fields.size()),
                     record.line);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file '" + path.string() + "'");
  return out;
}

}  // namespace

std::vector<RawEvent> read_events_csv(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"session_key", "timestamp", "page", "element_locator", "action_type", "input_data"});
  std::vector<RawEvent> events;
  while (auto record = reader.next()) {
    if (is_blank(*record)) continue;
    require_columns(*record, 6);
    auto& f = record->fields;
    RawEvent event;
    event.session_key = std::move(f[0]);
    event.timestamp = parse_int<std::int64_t>(f[1], "timestamp", record->line);
    event.page = std::move(f[2]);
    event.element_locator = std::move(f[3]);
    try {
      event.action_type = parse_action_type(f[4]);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), record->line);
    }
    if (!f[5].empty()) event.input_data = std::move(f[5]);
    events.push_back(std::move(event));
  }
  return events;
}

void write_events_csv(std::ostream& out, std::span<const RawEvent> events) {
  out << "session_key,timestamp,page,element_locator,action_type,input_data\n";
  for (const auto& e : events) {
    csv::write_row(out, {e.session_key, std::to_string(e.timestamp), e.page, e.element_locator,
                         std::string(to_string(e.action_type)), e.input_data.value_or("")});
  }
}

ActionCatalog read_catalog_csv(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"action_id", "page", "element_locator", "action_type"});
  ActionCatalog catalog;
  while (auto record = reader.next()) {
    if (is_blank(*record)) continue;
    require_columns(*record, 4);
    auto& f = record->fields;
    const auto id = parse_int<ActionId>(f[0], "action_id", record->line);
    ActionSignature signature;
    signature.page = std::move(f[1]);
    signature.element_locator = std::move(f[2]);
    try {
      signature.action_type = parse_action_type(f[3]);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), record->line);
    }
    if (id != catalog.size() + 1) {
      throw IntegrityError("catalog line " + std::to_string(record->line) + ": expected action_id " +
                           std::to_string(catalog.size() + 1) + ", found " + std::to_string(id));
    }
    if (catalog.find(signature)) {
      throw IntegrityError("catalog line " + std::to_string(record->line) + ": duplicate signature");
    }
    catalog.intern(signature);
  }
  return catalog;
}

void write_catalog_csv(std::ostream& out, const ActionCatalog& catalog) {
  out << "action_id,page,element_locator,action_type\n";
  ActionId id = 1;
  for (const auto& s : catalog.signatures()) {
    csv::write_row(out, {std::to_string(id++), s.page, s.element_locator, std::string(to_string(s.action_type))});
  }
}

void write_session_csv(const SessionLog& log, std::ostream& sessions, std::ostream& catalog) {
  sessions << "session_id,action_ids,start_timestamp\n";
  for (const auto& s : log.sessions) {
    sessions << s.session_id << ',';
    for (std::size_t i = 0; i < s.action_ids.size(); ++i) {
      if (i) sessions << ' ';
      sessions << s.action_ids[i];
    }
    sessions << ',' << s.start_timestamp << '\n';
  }
  write_catalog_csv(catalog, log.catalog);
}

SessionLog read_session_csv(std::istream& sessions, std::istream& catalog) {
  SessionLog log;
  log.catalog = read_catalog_csv(catalog);

  csv::Reader reader(sessions);
  reader.expect_header({"session_id", "action_ids", "start_timestamp"});
  while (auto record = reader.next()) {
    if (is_blank(*record)) continue;
    require_columns(*record, 3);
    const auto& f = record->fields;
    Session session;
    session.session_id = parse_int<std::uint64_t>(f[0], "session_id", record->line);
    session.start_timestamp = parse_int<std::int64_t>(f[2], "start_timestamp", record->line);
    std::string_view ids = f[1];
    while (!ids.empty()) {
      const auto space = ids.find(' ');
      const auto token = ids.substr(0, space);
      if (token.empty()) throw ParseError("field 'action_ids': repeated separator", record->line);
      const auto id = parse_int<ActionId>(token, "action_ids", record->line);
      if (!log.catalog.contains(id)) {
        throw IntegrityError("sessions line " + std::to_string(record->line) + ": unknown action ID " +
                             std::to_string(id));
      }
      session.action_ids.push_back(id);
      ids = space == std::string_view::npos ? std::string_view{} : ids.substr(space + 1);
    }
    if (session.action_ids.empty()) throw ParseError("field 'action_ids' is empty", record->line);
    log.sessions.push_back(std::move(session));
  }
  validate(log);
  return log;
}

std::vector<RawEvent> load_events(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_events_csv(in);
}

ActionCatalog load_catalog(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_catalog_csv(in);
}

SessionLog load_session_log(const std::filesystem::path& sessions, const std::filesystem::path& catalog) {
  auto sessions_in = open_input(sessions);
  auto catalog_in = open_input(catalog);
  return read_session_csv(sessions_in, catalog_in);
}

void save_session_log(const SessionLog& log, const std::filesystem::path& sessions,
                      const std::filesystem::path& catalog) {
  auto sessions_out = open_output(sessions);
  auto catalog_out = open_output(catalog);
  write_session_csv(log, sessions_out, catalog_out);
  if (!sessions_out || !catalog_out) throw Error("failed writing session log");
}

}  // namespace guirec
