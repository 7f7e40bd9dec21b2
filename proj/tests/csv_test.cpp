#include <gtest/gtest.h>

#include <sstream>

#include "guirec/csv.hpp"
#include "guirec/errors.hpp"

namespace csv = guirec::csv;

TEST(Csv, EscapeQuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv::escape("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, ReaderHandlesQuotesAndCrlf) {
  std::istringstream in("a,b,c\r\n\"x,1\",\"he said \"\"no\"\"\",\r\n\"multi\nline\",2,3\n");
  csv::Reader reader(in);
  auto r1 = reader.next();
  ASSERT_TRUE(r1);
  EXPECT_EQ(r1->fields, (std::vector<std::string>{"a", "b", "c"}));
  auto r2 = reader.next();
  ASSERT_TRUE(r2);
  EXPECT_EQ(r2->line, 2u);
  EXPECT_EQ(r2->fields, (std::vector<std::string>{"x,1", "he said \"no\"", ""}));
  auto r3 = reader.next();
  ASSERT_TRUE(r3);
  EXPECT_EQ(r3->line, 3u);
  EXPECT_EQ(r3->fields[0], "multi\nline");
  EXPECT_FALSE(reader.next());
}

TEST(Csv, WriteThenReadIsIdentity) {
  const std::vector<std::vector<std::string>> rows{
      {"id", "text"}, {"1", "comma, inside"}, {"2", "quote \" inside"}, {"3", ""}, {"4", "line\nbreak"}};
  std::ostringstream out;
  for (const auto& r : rows) csv::write_row(out, r);
  std::istringstream in(out.str());
  csv::Reader reader(in);
  for (const auto& r : rows) {
    auto rec = reader.next();
    ASSERT_TRUE(rec);
    EXPECT_EQ(rec->fields, r);
  }
  EXPECT_FALSE(reader.next());
}

TEST(Csv, UnterminatedQuoteReportsLine) {
  std::istringstream in("a\n\"open\n");
  csv::Reader reader(in);
  reader.next();
  try {
    reader.next();
    FAIL() << "expected ParseError";
  } catch (const guirec::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Csv, StrayQuoteIsAnError) {
  std::istringstream in("ab\"c\n");
  csv::Reader reader(in);
  EXPECT_THROW(reader.next(), guirec::ParseError);
}

TEST(Csv, HeaderMismatch) {
  std::istringstream in("x,y\n");
  csv::Reader reader(in);
  EXPECT_THROW(reader.expect_header({"x", "z"}), guirec::ParseError);
  std::istringstream empty("");
  csv::Reader reader2(empty);
  EXPECT_THROW(reader2.expect_header({"x"}), guirec::ParseError);
}
