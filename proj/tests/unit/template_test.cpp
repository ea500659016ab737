#include <gtest/gtest.h>

#include "frameql/error.h"
#include "frameql/language_pack.h"
#include "frameql/rewrite.h"

using namespace frameql;

TEST(Template, LongestVocabularyPrefixWins) {
    auto t = Template::parse("$left_subquery|$leftx");
    ASSERT_EQ(t.tokens().size(), 4u);
    EXPECT_EQ(t.tokens()[0].text, "left_subquery");
    EXPECT_EQ(t.tokens()[2].kind, Template::Token::Kind::Variable);
    EXPECT_EQ(t.tokens()[2].text, "left");
    EXPECT_EQ(t.tokens()[3].text, "x");
}

TEST(Template, DoubleDollarEscapesThenReadsVariable) {
    auto out = substitute(Template::parse("\"$$left\""), {{"left", "ten"}});
    EXPECT_EQ(out, "\"$ten\"");
}

TEST(Template, QuotedUnknownNameIsLiteral) {
    auto t = Template::parse("{ \"$match\": {} }");
    EXPECT_TRUE(t.unknown_variables().empty());
    EXPECT_EQ(substitute(t, {}), "{ \"$match\": {} }");
}

TEST(Template, BareUnknownNameFails) {
    auto t = Template::parse("SELECT $bogus");
    ASSERT_EQ(t.unknown_variables(), std::vector<std::string>{"bogus"});
    EXPECT_THROW(substitute(t, {}), Error);
}

TEST(Template, MissingBindingFails) {
    EXPECT_THROW(substitute(Template::parse("$left = $right"), {{"left", "a"}}), Error);
}

TEST(Template, BoundValuesAreNotRescanned) {
    auto out = substitute(Template::parse("$left"), {{"left", "$right $$left"}});
    EXPECT_EQ(out, "$right $$left");
}

TEST(Whitespace, NormalizeCollapsesRuns) {
    EXPECT_EQ(normalize_whitespace("  a \n\t b  "), "a b");
    EXPECT_EQ(strip_json_whitespace("{ \"a b\" : 1 }"), "{\"a b\":1}");
}

TEST(Config, SectionsContinuationsAndComments) {
    auto pack = parse_config(
        "; comment\n[PACK]\nname = demo\nkind = pipeline\n\n[QUERIES]\nq1 = first\n    second\n# another\n");
    EXPECT_EQ(pack.name(), "demo");
    EXPECT_EQ(pack.kind(), DialectKind::Pipeline);
    EXPECT_EQ(pack.at("QUERIES", "q1").source(), "first\n    second");
}

TEST(Config, AttributesHeaderIsAnAlias) {
    auto pack = parse_config("[ATTRIBUTES]\nsingle_attribute = $attribute\n");
    EXPECT_NE(pack.find("ATTRIBUTE ALIAS", "single_attribute"), nullptr);
}

TEST(Config, DuplicateKeyIsAParseError) {
    try {
        parse_config("[QUERIES]\nq1 = a\nq1 = b\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Config, MalformedInput) {
    EXPECT_THROW(parse_config("q1 = a\n"), ParseError);
    EXPECT_THROW(parse_config("[QUERIES\n"), ParseError);
    EXPECT_THROW(parse_config("[QUERIES]\njust words\n"), ParseError);
    EXPECT_THROW(parse_config("[PACK]\nkind = graph\n"), ParseError);
}

TEST(Config, StrictModeRejectsUnknownVariables) {
    EXPECT_THROW(parse_config("[QUERIES]\nq1 = SELECT $nope\n", true), ValidationError);
    EXPECT_NO_THROW(parse_config("[QUERIES]\nq1 = SELECT $nope\n", false));
}

TEST(Config, ChainAttributesFoldsThroughSeparator) {
    auto pack = parse_config("[ATTRIBUTE ALIAS]\nattribute_separator = $left, $right\n");
    std::vector<std::string> items = {"a", "b", "c"};
    EXPECT_EQ(chain_attributes(items, pack), "a, b, c");
    std::vector<std::string> one = {"a"};
    EXPECT_EQ(chain_attributes(one, pack), "a");
}
