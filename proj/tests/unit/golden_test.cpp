#include <gtest/gtest.h>

#include "frameql/bench.h"
#include "frameql/error.h"
#include "golden_check.h"

using namespace frameql;

namespace {

const bench::GoldenSet& goldens() {
    static const bench::GoldenSet set(FRAMEQL_GOLDEN_DIR);
    return set;
}

class GoldenPack : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST_P(GoldenPack, BenchmarkTextsMatch) {
    auto results = testkit::compare_benchmark(goldens(), GetParam());
    ASSERT_EQ(results.size(), 13u);
    for (const auto& c : results) {
        EXPECT_TRUE(c.match) << c.label << "\n got:  " << c.got << "\n want: " << c.want;
    }
}

TEST_P(GoldenPack, ChainStepsMatch) {
    auto results = testkit::compare_chain(goldens(), GetParam());
    ASSERT_EQ(results.size(), 7u);
    for (const auto& c : results) {
        EXPECT_TRUE(c.match) << c.label << "\n got:  " << c.got << "\n want: " << c.want;
    }
}

INSTANTIATE_TEST_SUITE_P(Builtin, GoldenPack, ::testing::Values("sqlpp", "sql", "cypher", "mongo"));

TEST(Golden, PipelineHeadPutsIdExclusionLast) {
    auto queries = testkit::chain_queries("mongo");
    const QueryText& action = queries.back();
    ASSERT_EQ(action.kind(), QueryText::Kind::Stages);
    EXPECT_TRUE(testkit::id_exclusion_last(action.stage_list()));
    EXPECT_FALSE(testkit::id_exclusion_last({R"({"$project":{"_id":0}})", R"({"$project":{"a":1}})"}));
    EXPECT_FALSE(testkit::id_exclusion_last({R"({"$project":{"_id":0}})", R"({"$match":{}})", R"({"$limit":1})"}));
}

TEST(Golden, ErrataApplyAndAreAccounted) {
    const auto& g = goldens();
    EXPECT_EQ(g.errata().size(), 37u);
    std::size_t verbatim = 0;
    for (const auto& pack : testkit::builtin_pack_names()) {
        for (int id = 1; id <= 13; ++id) {
            std::string file = bench::GoldenSet::benchmark_file(pack, id);
            if (g.errata_count(file) == 0) {
                ++verbatim;
                EXPECT_EQ(g.raw(file), g.corrected(file));
            } else {
                EXPECT_NE(g.raw(file), g.corrected(file));
            }
        }
    }
    EXPECT_EQ(verbatim, 32u);
    for (const auto& e : g.errata()) EXPECT_FALSE(e.reason.empty()) << e.file;
}

TEST(Golden, NormalizationIgnoresLayoutOnly) {
    EXPECT_EQ(bench::normalize_query("SELECT  a,\n   b\nFROM t", DialectKind::Text),
              bench::normalize_query("SELECT a, b FROM t", DialectKind::Text));
    EXPECT_NE(bench::normalize_query("SELECT a FROM t", DialectKind::Text),
              bench::normalize_query("SELECT b FROM t", DialectKind::Text));
}

TEST(Golden, ChainExpansion) {
    auto steps = bench::expand_chain("== 1\nA\n== 2\nB (@1)\n== 3\n@2 C\n");
    ASSERT_EQ(steps.size(), 3u);
    EXPECT_EQ(steps[2].find("B ("), 0u);
    EXPECT_NE(steps[2].find("A"), std::string::npos);
    EXPECT_THROW(bench::expand_chain("== 2\nA\n"), ParseError);
}
