#include <gtest/gtest.h>

#include "frameql/error.h"
#include "frameql/json_io.h"
#include "frameql/sql.h"

using namespace frameql;
using sql::Dialect;

namespace {

Catalog sample() {
    Catalog c;
    c.put("", "data", json_io::read(R"({"k":1,"v":10,"s":"a"}
{"k":2,"v":20,"s":"b"}
{"k":1,"v":null,"s":"c"}
{"k":3,"s":"d"}
{"k":2,"v":5,"s":"e"}
)"));
    c.put("", "left", json_io::read("{\"id\":1,\"a\":\"x\"}\n{\"id\":2,\"a\":\"y\"}\n{\"a\":\"z\"}\n"));
    c.put("", "right", json_io::read("{\"id\":1,\"b\":true}\n{\"id\":1,\"b\":false}\n{\"id\":3,\"b\":true}\n"));
    return c;
}

Table run(const std::string& q, Dialect d, Catalog& c) { return sql::eval(sql::parse(q, d), c); }

std::int64_t scalar_int(const Table& t) {
    EXPECT_EQ(t.size(), 1u);
    EXPECT_EQ(t.rows[0].size(), 1u);
    return t.rows[0].fields().front().second.as_int();
}

}  // namespace

TEST(SqlExec, CountAndWhere) {
    Catalog c = sample();
    EXPECT_EQ(scalar_int(run("SELECT COUNT(*) FROM data;", Dialect::Sql, c)), 5);
    EXPECT_EQ(scalar_int(run("SELECT COUNT(*) FROM (SELECT * FROM data) t WHERE \"v\" > 6", Dialect::Sql, c)), 2);
    EXPECT_EQ(scalar_int(run("SELECT VALUE COUNT(*) FROM data t WHERE t.v IS UNKNOWN", Dialect::SqlPlusPlus, c)), 2);
    EXPECT_EQ(scalar_int(run("SELECT VALUE COUNT(*) FROM data t WHERE t.v IS MISSING", Dialect::SqlPlusPlus, c)), 1);
    EXPECT_EQ(scalar_int(run("SELECT COUNT(*) FROM data WHERE v IS NOT NULL", Dialect::Sql, c)), 3);
}

TEST(SqlExec, ThreeValuedWhere) {
    Catalog c = sample();
    // NULL and MISSING rows satisfy neither the predicate nor its negation.
    EXPECT_EQ(scalar_int(run("SELECT COUNT(*) FROM data WHERE NOT (v = 10)", Dialect::Sql, c)), 2);
    EXPECT_EQ(scalar_int(run("SELECT COUNT(*) FROM data WHERE v = 10 OR k = 3", Dialect::Sql, c)), 2);
    EXPECT_EQ(scalar_int(run("SELECT COUNT(*) FROM data WHERE v <> 10 AND k = 2", Dialect::Sql, c)), 2);
}

TEST(SqlExec, SelectValueReturnsWholeRecords) {
    Catalog c = sample();
    Table t = run("SELECT VALUE t FROM data t WHERE t.k = 3;", Dialect::SqlPlusPlus, c);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.rows[0], (Record{{"k", Value::integer(3)}, {"s", Value::string("d")}}));
}

TEST(SqlExec, DialectQuoting) {
    Catalog c = sample();
    // sql: double quotes are identifiers; sqlpp: strings.
    EXPECT_EQ(scalar_int(run("SELECT COUNT(*) FROM data WHERE \"s\" = 'a'", Dialect::Sql, c)), 1);
    EXPECT_EQ(scalar_int(run("SELECT VALUE COUNT(*) FROM data t WHERE t.s = \"a\"", Dialect::SqlPlusPlus, c)), 1);
    EXPECT_EQ(scalar_int(run("SELECT VALUE COUNT(*) FROM data t WHERE t.`s` = 'it''s'", Dialect::SqlPlusPlus, c)), 0);
    EXPECT_THROW(sql::parse("SELECT VALUE t FROM data t", Dialect::Sql), ParseError);
    EXPECT_THROW(sql::parse("SELECT * FROM data t WHERE t.v IS MISSING", Dialect::Sql), ParseError);
}

TEST(SqlExec, GroupByKeepsFirstAppearanceOrder) {
    Catalog c = sample();
    Table t = run("SELECT k, COUNT(v) AS cnt, MAX(v) AS mx FROM data GROUP BY k", Dialect::Sql, c);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t.rows[0], (Record{{"k", Value::integer(1)}, {"cnt", Value::integer(1)}, {"mx", Value::integer(10)}}));
    EXPECT_EQ(t.rows[1], (Record{{"k", Value::integer(2)}, {"cnt", Value::integer(2)}, {"mx", Value::integer(20)}}));
    EXPECT_EQ(t.rows[2], (Record{{"k", Value::integer(3)}, {"cnt", Value::integer(0)}, {"mx", Value::null()}}));
}

TEST(SqlExec, AggregatesOverEmptyInput) {
    Catalog c = sample();
    Table t = run("SELECT COUNT(*) AS n, MIN(v) AS lo, AVG(v) AS m FROM data WHERE k = 99", Dialect::Sql, c);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.rows[0].get("n"), Value::integer(0));
    EXPECT_TRUE(t.rows[0].get("lo").is_null());
    EXPECT_TRUE(t.rows[0].get("m").is_null());
    EXPECT_EQ(run("SELECT k FROM data WHERE k = 99 GROUP BY k", Dialect::Sql, c).size(), 0u);
}

TEST(SqlExec, AggregateValues) {
    Catalog c = sample();
    Table t = run("SELECT AVG(v) AS a, SUM(v) AS s, STDDEV_POP(v) AS d FROM data", Dialect::Sql, c);
    EXPECT_DOUBLE_EQ(t.rows[0].get("a").as_number(), 35.0 / 3.0);
    EXPECT_EQ(t.rows[0].get("s"), Value::integer(35));
    EXPECT_NEAR(t.rows[0].get("d").as_number(), 6.2360956446, 1e-9);
}

TEST(SqlExec, OrderByStableAndLimit) {
    Catalog c = sample();
    Table t = run("SELECT s FROM data ORDER BY k DESC LIMIT 3", Dialect::Sql, c);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t.rows[0].get("s"), Value::string("d"));
    EXPECT_EQ(t.rows[1].get("s"), Value::string("b"));
    EXPECT_EQ(t.rows[2].get("s"), Value::string("e"));
    Table asc = run("SELECT s FROM data ORDER BY v", Dialect::Sql, c);
    EXPECT_EQ(asc.rows[0].get("s"), Value::string("d"));  // MISSING, then NULL, then numbers
    EXPECT_EQ(asc.rows[1].get("s"), Value::string("c"));
    EXPECT_EQ(asc.rows[2].get("s"), Value::string("e"));
}

TEST(SqlExec, ExpressionsAndNaming) {
    Catalog c = sample();
    Table t = run("SELECT (v + 1) * 2 AS a, v / 4 AS d, k % 2 AS m, upper(s), -k AS n FROM data WHERE k = 2 LIMIT 1",
                  Dialect::Sql, c);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.rows[0], (Record{{"a", Value::integer(42)}, {"d", Value::real(5.0)}, {"m", Value::integer(0)},
                                 {"upper", Value::string("B")}, {"n", Value::integer(-2)}}));
    Table anon = run("SELECT (v + 1) * 2 FROM data WHERE k = 2 LIMIT 1", Dialect::Sql, c);
    EXPECT_EQ(anon.rows[0].fields()[0].first, "?column?");
    Table u = run("SELECT (v + 1) * 2, v / 4 FROM data t WHERE t.k = 2 LIMIT 1", Dialect::SqlPlusPlus, c);
    EXPECT_EQ(u.rows[0].fields()[0].first, "$1");
    EXPECT_EQ(u.rows[0].get("$2"), Value::real(5.0));
    Table casts = run("SELECT CAST(k = 1 AS INTEGER) AS i, CAST(k AS TEXT) AS s FROM data LIMIT 1", Dialect::Sql, c);
    EXPECT_EQ(casts.rows[0].get("i"), Value::integer(1));
    EXPECT_EQ(casts.rows[0].get("s"), Value::string("1"));
}

TEST(SqlExec, Errors) {
    Catalog c = sample();
    EXPECT_THROW(run("SELECT * FROM nowhere", Dialect::Sql, c), EvalError);
    EXPECT_THROW(run("SELECT v / 0 FROM data", Dialect::Sql, c), EvalError);
    EXPECT_THROW(run("SELECT s + 1 FROM data", Dialect::Sql, c), EvalError);
    EXPECT_THROW(sql::parse("SELECT FROM data", Dialect::Sql), ParseError);
    EXPECT_THROW(sql::parse("SELECT * FROM data WHERE", Dialect::Sql), ParseError);
    EXPECT_THROW(sql::parse("SELECT nosuch(k) FROM data", Dialect::Sql), ParseError);
    EXPECT_THROW(sql::parse("SELECT * FROM data extra junk", Dialect::Sql), ParseError);
    try {
        sql::parse("SELECT *\nFROM data\nWHERE 'open", Dialect::Sql);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(SqlExec, HashJoin) {
    Catalog c = sample();
    Table t = run("SELECT l.*,r.* FROM (SELECT * FROM left) l INNER JOIN (SELECT * FROM right) r ON l.id = r.id",
                  Dialect::Sql, c);
    EXPECT_EQ(t.size(), 2u);
    Table pp = run("SELECT VALUE COUNT(*) FROM (SELECT l,r FROM left l JOIN right r ON l.id = r.id) t",
                   Dialect::SqlPlusPlus, c);
    EXPECT_EQ(scalar_int(pp), 2);
    Table nested = run("SELECT l,r FROM left l JOIN right r ON l.id = r.id", Dialect::SqlPlusPlus, c);
    EXPECT_EQ(nested.rows[0].get("l.a"), Value::string("x"));
    EXPECT_EQ(nested.rows[0].get("r.b"), Value::boolean(true));
    // Non-equi condition takes the nested-loop path.
    Table loop = run("SELECT COUNT(*) FROM left l JOIN right r ON l.id < r.id", Dialect::Sql, c);
    EXPECT_EQ(scalar_int(loop), 2);
}

TEST(SqlExec, WritesRespectOverwriteFlag) {
    Catalog c = sample();
    run("CREATE TABLE copy AS SELECT * FROM data WHERE k = 1;", Dialect::Sql, c);
    EXPECT_EQ(c.get("", "copy").size(), 2u);
    EXPECT_THROW(run("CREATE TABLE copy AS SELECT * FROM data;", Dialect::Sql, c), EvalError);
    sql::eval(sql::parse("CREATE TABLE copy AS SELECT * FROM data;", Dialect::Sql), c, WriteOptions{true});
    EXPECT_EQ(c.get("", "copy").size(), 5u);
    run("INSERT INTO ns.out (SELECT VALUE t FROM data t WHERE t.k = 2);", Dialect::SqlPlusPlus, c);
    EXPECT_EQ(c.get("ns", "out").size(), 2u);
}

TEST(SqlExec, Deterministic) {
    Catalog c = sample();
    const std::string q = "SELECT k, COUNT(*) AS n FROM data GROUP BY k ORDER BY n DESC";
    EXPECT_EQ(json_io::write(run(q, Dialect::Sql, c)), json_io::write(run(q, Dialect::Sql, c)));
}
