#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "guirec/catalog.hpp"

namespace guirec {

// events.csv: session_key,timestamp,page,element_locator,action_type,input_data
// An empty input_data column reads back as "no input".
std::vector<RawEvent> read_events_csv(std::istream& in);
void write_events_csv(std::ostream& out, std::span<const RawEvent> events);

// catalog.csv: action_id,page,element_locator,action_type (IDs dense, ascending).
ActionCatalog read_catalog_csv(std::istream& in);
void write_catalog_csv(std::ostream& out, const ActionCatalog& catalog);

// sessions.csv: session_id,action_ids,start_timestamp with action_ids
// space-separated. Reading validates every ID against `catalog`.
void write_session_csv(const SessionLog& log, std::ostream& sessions, std::ostream& catalog);
SessionLog read_session_csv(std::istream& sessions, std::istream& catalog);

// File-path conveniences; throw Error when a file cannot be opened.
std::vector<RawEvent> load_events(const std::filesystem::path& path);
ActionCatalog load_catalog(const std::filesystem::path& path);
SessionLog load_session_log(const std::filesystem::path& sessions, const std::filesystem::path& catalog);
void save_session_log(const SessionLog& log, const std::filesystem::path& sessions,
                      const std::filesystem::path& catalog);

}  // namespace guirec
