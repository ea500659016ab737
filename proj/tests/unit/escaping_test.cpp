#include <gtest/gtest.h>

#include "escape_oracle.h"

using namespace frameql;

TEST(Escaping, RandomTemplatesMatchTokenOracle) {
    testkit::EscapeCase bad;
    const int failures = testkit::run_escape_oracle(20240601, 5000, &bad);
    EXPECT_EQ(failures, 0) << "source: " << bad.source << "\nexpected: " << bad.expected;
}

TEST(Escaping, OracleDetectsABrokenRenderer) {
    // Sanity check of the oracle itself: a renderer that drops the escape is caught.
    std::mt19937_64 rng(7);
    int caught = 0;
    for (int i = 0; i < 200; ++i) {
        auto c = testkit::make_escape_case(rng);
        if (c.source.find("$$") == std::string::npos) continue;
        std::string wrong = substitute(Template::parse(c.source), c.bindings);
        auto at = wrong.find('$');
        if (at != std::string::npos) wrong.erase(at, 1);
        caught += wrong != c.expected;
    }
    EXPECT_GT(caught, 0);
}

TEST(Escaping, PipelineOperandForm) {
    auto t = Template::parse("\"$eq\": [\"$$left\", $right]");
    EXPECT_EQ(substitute(t, {{"left", "lang"}, {"right", "\"en\""}}), "\"$eq\": [\"$lang\", \"en\"]");
}

TEST(Escaping, FourDollarsBeforeVariable) {
    // "$$$$lookup_var": two literal dollars then the variable.
    auto t = Template::parse("\"$$$$lookup_var\"");
    EXPECT_EQ(substitute(t, {{"lookup_var", "left"}}), "\"$$left\"");
}
