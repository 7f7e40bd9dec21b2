#include <gtest/gtest.h>

#include <algorithm>

#include "guirec/catalog.hpp"
#include "guirec/errors.hpp"
#include "test_support.hpp"

using namespace guirec;

namespace {

RawEvent event(std::string key, std::int64_t ts, std::string page, std::string locator,
               ActionType type = ActionType::click) {
  return RawEvent{std::move(key), ts, std::move(page), std::move(locator), type, std::nullopt};
}

}  // namespace

TEST(Catalog, NormalizePageDropsQueryAndFragment) {
  EXPECT_EQ(normalize_page("/login?return_to=%2F"), "/login");
  EXPECT_EQ(normalize_page("/repo#readme"), "/repo");
  EXPECT_EQ(normalize_page("/a/b"), "/a/b");
  EXPECT_EQ(normalize_page("?only"), "");
}

TEST(Catalog, ActionTypeNames) {
  for (auto t : {ActionType::click, ActionType::type_text, ActionType::select, ActionType::navigate,
                 ActionType::submit, ActionType::other}) {
    EXPECT_EQ(parse_action_type(to_string(t)), t);
  }
  EXPECT_THROW(parse_action_type("hover"), ValidationError);
}

TEST(Catalog, InternMintsDenseIdsInFirstSeenOrder) {
  ActionCatalog c;
  const ActionSignature a{"/p", "//a", ActionType::click};
  const ActionSignature b{"/p", "//a", ActionType::type_text};
  EXPECT_EQ(c.intern(a), 1u);
  EXPECT_EQ(c.intern(b), 2u);
  EXPECT_EQ(c.intern(a), 1u);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.signature(2), b);
  EXPECT_EQ(c.find(b), 2u);
  EXPECT_FALSE(c.find({"/q", "//a", ActionType::click}));
  EXPECT_THROW(c.signature(0), std::out_of_range);
  EXPECT_THROW(c.signature(3), std::out_of_range);
}

TEST(Catalog, InputDataAndQueryDoNotChangeTheId) {
  ActionCatalog c;
  auto e1 = event("s", 1, "/login?x=1", "//input", ActionType::type_text);
  e1.input_data = "alice";
  auto e2 = event("s", 2, "/login#frag", "//input", ActionType::type_text);
  e2.input_data = "bob";
  EXPECT_EQ(derive_action_id(c, e1), derive_action_id(c, e2));
  EXPECT_EQ(c.size(), 1u);
}

TEST(Catalog, NavigateWithoutLocatorUsesPage) {
  const auto sig = signature_of(event("s", 1, "/dash?tab=1", "", ActionType::navigate));
  EXPECT_EQ(sig.element_locator, "/dash");
  EXPECT_THROW(signature_of(event("s", 1, "/dash", "", ActionType::click)), ValidationError);
}

TEST(Catalog, InvalidEventsAreRejected) {
  EXPECT_THROW(signature_of(event("s", -1, "/p", "//a")), ValidationError);
  EXPECT_THROW(signature_of(event("s", 1, "", "//a")), ValidationError);
  EXPECT_THROW(signature_of(event("s", 1, "#x", "//a")), ValidationError);
}

TEST(Catalog, IngestGroupsAndOrders) {
  // Deliberately shuffled input rows.
  const std::vector<RawEvent> rows{
      event("b", 20, "/p", "//y"), event("a", 11, "/p", "//y"), event("b", 19, "/p", "//x"),
      event("a", 10, "/p", "//x"), event("c", 15, "/p", "//z"),
  };
  const auto log = ingest_events(rows);
  ASSERT_EQ(log.sessions.size(), 3u);
  EXPECT_EQ(log.sessions[0].start_timestamp, 10);
  EXPECT_EQ(log.sessions[1].start_timestamp, 15);
  EXPECT_EQ(log.sessions[2].start_timestamp, 19);
  EXPECT_EQ(log.sessions[0].action_ids, (std::vector<ActionId>{1, 2}));
  EXPECT_EQ(log.sessions[1].action_ids, (std::vector<ActionId>{3}));
  EXPECT_EQ(log.sessions[2].action_ids, (std::vector<ActionId>{1, 2}));
  EXPECT_EQ(log.total_actions(), 5u);
  EXPECT_NO_THROW(validate(log));
}

TEST(Catalog, IngestIsInvariantUnderRowPermutation) {
  std::vector<RawEvent> rows;
  for (int s = 0; s < 6; ++s) {
    for (int i = 0; i < 4; ++i) {
      rows.push_back(event("k" + std::to_string(s), 100 * (s % 3) + i, "/p" + std::to_string(i % 2),
                           "//e" + std::to_string((s + i) % 5)));
    }
  }
  const auto reference = ingest_events(rows);
  std::mt19937 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(rows.begin(), rows.end(), gen);
    EXPECT_EQ(ingest_events(rows), reference);
  }
}

TEST(Catalog, IngestRejectsBadRowWithoutPartialState) {
  const std::vector<RawEvent> rows{event("a", 1, "/p", "//x"), event("a", 2, "", "//y")};
  EXPECT_THROW(ingest_events(rows), ValidationError);
}

TEST(Catalog, IngestWithSeedCatalogAppendsNewIds) {
  auto seed = guirec::testing::numbered_catalog(3);
  const std::vector<RawEvent> rows{event("a", 1, "/p", "//button[2]"), event("a", 2, "/new", "//x")};
  const auto log = ingest_events(rows, seed);
  EXPECT_EQ(log.sessions[0].action_ids, (std::vector<ActionId>{2, 4}));
  EXPECT_EQ(log.catalog.size(), 4u);
}

TEST(Catalog, ValidateCatchesBrokenLogs) {
  auto log = guirec::testing::make_log({{1, 2}, {2}}, 2);
  EXPECT_NO_THROW(validate(log));

  auto unknown = log;
  unknown.sessions[1].action_ids = {3};
  EXPECT_THROW(validate(unknown), IntegrityError);

  auto empty = log;
  empty.sessions[0].action_ids.clear();
  EXPECT_THROW(validate(empty), IntegrityError);

  auto dup = log;
  dup.sessions[1].session_id = 1;
  EXPECT_THROW(validate(dup), IntegrityError);

  auto time = log;
  time.sessions[1].start_timestamp = 0;
  EXPECT_THROW(validate(time), IntegrityError);
}

TEST(Catalog, AppendSessionsRenumbers) {
  auto base = guirec::testing::make_log({{1, 2}}, 2);
  auto extra = guirec::testing::make_log({{3}, {1, 3}}, 3);
  for (auto& s : extra.sessions) s.start_timestamp += 100;
  append_sessions(base, extra);
  ASSERT_EQ(base.sessions.size(), 3u);
  EXPECT_EQ(base.sessions[1].session_id, 2u);
  EXPECT_EQ(base.sessions[2].session_id, 3u);
  EXPECT_EQ(base.catalog.size(), 3u);
  EXPECT_NO_THROW(validate(base));

  auto other = guirec::testing::make_log({{1}}, 1);
  other.catalog = ActionCatalog{};
  other.catalog.intern({"/elsewhere", "//z", ActionType::click});
  EXPECT_THROW(append_sessions(base, other), IntegrityError);
}
