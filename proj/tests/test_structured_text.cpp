#include <gtest/gtest.h>

#include "rankaudit/error.hpp"
#include "rankaudit/structured_text.hpp"

using namespace rankaudit;

TEST(StructuredText, ScalarsArraysTables) {
  const auto doc = parse_structured_text(
      "# header\n"
      "name = \"a \\\"b\\\"\"   # trailing\n"
      "n = 1_000\n"
      "x = -2.5e-1\n"
      "on = true\n"
      "dims = [1, 2, 3,]\n"
      "\"odd key\" = {metric = \"NSD\", tau_mm = 2}\n");
  ASSERT_EQ(doc.entries.size(), 6U);
  EXPECT_EQ(doc.find("name")->value.as_string("name"), "a \"b\"");
  EXPECT_EQ(doc.find("n")->value.as_number("n"), 1000.0);
  EXPECT_EQ(doc.find("x")->value.as_number("x"), -0.25);
  EXPECT_TRUE(doc.find("on")->value.as_bool("on"));
  EXPECT_EQ(doc.find("dims")->value.as_numbers("dims"), (std::vector<double>{1, 2, 3}));
  const StEntry* t = doc.find("odd key");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->line, 7U);
  EXPECT_EQ(t->value.find("metric")->as_string("metric"), "NSD");
  EXPECT_EQ(t->value.find("tau_mm")->as_number("tau"), 2.0);
  EXPECT_EQ(t->value.find("absent"), nullptr);
}

TEST(StructuredText, ErrorsCarryLineNumbers) {
  try {
    parse_structured_text("a = 1\nb = [1, 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_structured_text("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(parse_structured_text("a = \"open\n"), ConfigError);
  EXPECT_THROW(parse_structured_text("a = 1 2\n"), ConfigError);
  EXPECT_THROW(parse_structured_text("= 3\n"), ConfigError);
  EXPECT_THROW(parse_structured_text("t = {k = 1, k = 2}\n"), ConfigError);
}

TEST(StructuredText, KindMismatchThrows) {
  const auto doc = parse_structured_text("s = \"x\"\n");
  EXPECT_THROW(doc.find("s")->value.as_number("s"), ConfigError);
  EXPECT_THROW(doc.find("s")->value.as_bool("s"), ConfigError);
  EXPECT_THROW(doc.find("s")->value.as_numbers("s"), ConfigError);
}

TEST(StructuredText, QuoteRoundTrip) {
  const std::string raw = "tab\there \"q\" back\\slash";
  const auto doc = parse_structured_text("k = " + quote_string(raw) + "\n");
  EXPECT_EQ(doc.find("k")->value.as_string("k"), raw);
}

TEST(StructuredText, CrlfAndBlankLines) {
  const auto doc = parse_structured_text("\r\n  \r\na = 1\r\n");
  ASSERT_EQ(doc.entries.size(), 1U);
  EXPECT_EQ(doc.entries[0].line, 3U);
}
