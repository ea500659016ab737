#include <gtest/gtest.h>

#include <chrono>

#include "frameql/error.h"
#include "frameql/frame.h"
#include "frameql/http_connector.h"
#include "frameql/json_io.h"
#include "frameql/local_connector.h"
#include "http_stub.h"

using namespace frameql;
using testkit::HttpStub;

namespace {

HttpEndpointConfig config_for(const HttpStub& stub) {
    HttpEndpointConfig c;
    c.base_url = stub.base_url();
    c.timeout_ms = 2000;
    return c;
}

}  // namespace

TEST(LocalConnector, DialectMapping) {
    EXPECT_EQ(local_dialect_for("sql"), LocalDialect::Sql);
    EXPECT_EQ(local_dialect_for("sqlpp"), LocalDialect::SqlPlusPlus);
    EXPECT_EQ(local_dialect_for("mongo"), LocalDialect::Pipeline);
    EXPECT_THROW(local_dialect_for("cypher"), Error);
}

TEST(LocalConnector, ExecutesAndWrapsErrors) {
    auto catalog = std::make_shared<Catalog>();
    catalog->put("", "t", json_io::read("{\"a\":1}\n{\"a\":2}\n"));
    LocalConnector conn(LocalDialect::Sql, catalog);
    Table t = run_query(conn, QueryText::text("SELECT a FROM t WHERE a > 1"));
    EXPECT_EQ(t.size(), 1u);
    try {
        run_query(conn, QueryText::text("SELECT a FROM missing_table"));
        FAIL();
    } catch (const ConnectorError& e) {
        EXPECT_EQ(e.query(), "SELECT a FROM missing_table");
    }
    EXPECT_THROW(run_query(conn, QueryText::text("SELEC a")), ConnectorError);
}

TEST(LocalConnector, RunsStageLists) {
    auto catalog = std::make_shared<Catalog>();
    catalog->put("db", "c", json_io::read("{\"a\":1}\n{\"a\":2}\n{\"a\":3}\n"));
    LocalConnector conn(LocalDialect::Pipeline, catalog);
    Table t = run_query(conn, QueryText::stages({R"({"$match":{"a":{"$gte":2}}})", R"({"$count":"n"})"}, "db", "c"));
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.rows[0].get("n"), Value::integer(2));
}

TEST(HttpConnector, SuccessRoundTrip) {
    HttpStub stub;
    stub.set_reply({200, R"({"status":"ok","results":[{"a":1,"b":"x"},{"a":2}]})"});
    HttpEndpointConfig cfg = config_for(stub);
    cfg.response_rows_pointer = "/results";
    cfg.query_path = "/run";
    cfg.auth_header = "Authorization: Bearer token123";
    HttpConnector conn(cfg);
    Table t = run_query(conn, QueryText::text("SELECT 1;"));
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t.rows[0], (Record{{"a", Value::integer(1)}, {"b", Value::string("x")}}));
    EXPECT_FALSE(t.rows[1].has("b"));
    EXPECT_EQ(stub.last_body(), "SELECT 1;");
    EXPECT_EQ(stub.last_path(), "/run");
    EXPECT_EQ(stub.last_auth(), "Bearer token123");
    EXPECT_EQ(stub.last_content_type().rfind("text/plain", 0), 0u);
}

TEST(HttpConnector, ScalarRowsAndStageRendering) {
    HttpStub stub;
    stub.set_reply({200, "[7]"});
    HttpConnector conn(config_for(stub));
    Table t = run_query(conn, QueryText::stages({R"({"$match":{}})"}, "Test", "Users"));
    EXPECT_EQ(t.rows, (std::vector<Record>{Record{{"value", Value::integer(7)}}}));
    EXPECT_EQ(stub.last_body().rfind("Test.Users.aggregate([", 0), 0u);
}

TEST(HttpConnector, FrameActionsGoThroughHttp) {
    HttpStub stub;
    stub.set_reply({200, R"([{"count":42}])"});
    auto conn = std::make_shared<HttpConnector>(config_for(stub));
    Frame df = Frame::scan("", "data", load_builtin("sql"), conn);
    Frame filtered = df[df["ten"] == 3];
    EXPECT_EQ(stub.requests(), 0);
    EXPECT_EQ(filtered.count(), 42);
    EXPECT_EQ(stub.requests(), 1);
    EXPECT_NE(stub.last_body().find("\"ten\" = 3"), std::string::npos) << stub.last_body();
}

TEST(HttpConnector, NonSuccessStatusCarriesQuery) {
    HttpStub stub;
    stub.set_reply({500, "internal failure: table missing", "text/plain"});
    HttpConnector conn(config_for(stub));
    try {
        run_query(conn, QueryText::text("SELECT * FROM nothing"));
        FAIL();
    } catch (const ConnectorError& e) {
        EXPECT_EQ(e.query(), "SELECT * FROM nothing");
        EXPECT_NE(std::string(e.what()).find("500"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("table missing"), std::string::npos);
    }
    stub.set_reply({404, "no"});
    EXPECT_THROW(run_query(conn, QueryText::text("q")), ConnectorError);
}

TEST(HttpConnector, TimeoutIsHonored) {
    HttpStub stub;
    stub.set_reply({200, "[]", "application/json", 3000});
    HttpEndpointConfig cfg = config_for(stub);
    cfg.timeout_ms = 300;
    HttpConnector conn(cfg);
    auto start = std::chrono::steady_clock::now();
    try {
        run_query(conn, QueryText::text("SLOW"));
        FAIL();
    } catch (const ConnectorError& e) {
        EXPECT_NE(std::string(e.what()).find("timed out"), std::string::npos) << e.what();
        EXPECT_EQ(e.query(), "SLOW");
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    EXPECT_LT(elapsed.count(), 600);
    EXPECT_GE(elapsed.count(), 250);
}

TEST(HttpConnector, MalformedEnvelopes) {
    HttpStub stub;
    HttpEndpointConfig cfg = config_for(stub);
    cfg.response_rows_pointer = "/rows";
    HttpConnector conn(cfg);
    for (const char* body : {"not json", R"({"other":[]})", R"({"rows":{"a":1}})"}) {
        stub.set_reply({200, body});
        try {
            run_query(conn, QueryText::text("Q"));
            ADD_FAILURE() << body;
        } catch (const ConnectorError& e) {
            EXPECT_NE(std::string(e.what()).find("malformed response envelope"), std::string::npos) << e.what();
        }
    }
}

TEST(HttpConnector, UnreachableServerAndBadConfig) {
    HttpEndpointConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";
    cfg.timeout_ms = 500;
    HttpConnector conn(cfg);
    EXPECT_THROW(run_query(conn, QueryText::text("Q")), ConnectorError);

    HttpConnector unconfigured;
    EXPECT_THROW(unconfigured.initialize({}), Error);
    EXPECT_THROW(unconfigured.initialize({{"base_url", "http://x"}, {"auth_header", "nocolon"}}), Error);
    EXPECT_THROW(unconfigured.initialize({{"base_url", "http://x"}, {"timeout_ms", "-5"}}), Error);
    auto parsed = HttpEndpointConfig::from_map({{"base_url", "http://h:1"}, {"timeout_ms", "250"}});
    EXPECT_EQ(parsed.timeout_ms, 250);
    EXPECT_EQ(parsed.query_path, "/query");
}
