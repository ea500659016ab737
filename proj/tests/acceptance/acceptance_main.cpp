// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "escape_oracle.h"
#include "frameql/bench.h"
#include "frameql/catalog.h"
#include "frameql/datagen.h"
#include "frameql/error.h"
#include "frameql/frame.h"
#include "frameql/http_connector.h"
#include "frameql/local_connector.h"
#include "frameql/pack_catalog.h"
#include "frameql/random.h"
#include "golden_check.h"
#include "http_stub.h"
#include "spy_connector.h"
#include "wisconsin_oracle.h"

using namespace frameql;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    return buf;
}

const bench::GoldenSet& goldens() {
    static const bench::GoldenSet set(FRAMEQL_GOLDEN_DIR);
    return set;
}

Outcome golden_translations() {
    auto start = Clock::now();
    int total = 0;
    int matched = 0;
    std::string first;
    for (const auto& pack : testkit::builtin_pack_names()) {
        for (const auto& c : testkit::compare_benchmark(goldens(), pack)) {
            ++total;
            if (c.match) {
                ++matched;
            } else if (first.empty()) {
                first = c.label + ": got [" + c.got + "] want [" + c.want + "]";
            }
        }
    }
    std::size_t verbatim = 0;
    for (const auto& pack : testkit::builtin_pack_names()) {
        for (int id = 1; id <= bench::kExpressionCount; ++id) {
            if (goldens().errata_count(bench::GoldenSet::benchmark_file(pack, id)) == 0) ++verbatim;
        }
    }
    double took = seconds_since(start);
    std::string detail = std::to_string(matched) + "/" + std::to_string(total) + " match (" +
                         std::to_string(verbatim) + " reference texts verbatim, " +
                         std::to_string(goldens().errata().size()) + " documented errata), " + fmt_seconds(took);
    if (!first.empty()) detail += "; first mismatch " + first;
    if (took >= 5.0) detail += "; over the 5s budget";
    return {total == 52 && matched == 52 && took < 5.0, detail};
}

Outcome chain_replay() {
    int steps = 0;
    int matched = 0;
    int full_matched = 0;
    std::string first;
    for (const auto& pack : testkit::builtin_pack_names()) {
        for (const auto& c : testkit::compare_chain(goldens(), pack)) {
            bool is_full = c.label.find("full") != std::string::npos;
            if (!is_full) ++steps;
            if (c.match) {
                ++(is_full ? full_matched : matched);
            } else if (first.empty()) {
                first = c.label + ": got [" + c.got + "] want [" + c.want + "]";
            }
        }
    }
    auto mongo = testkit::chain_queries("mongo");
    bool id_last = mongo.back().kind() == QueryText::Kind::Stages && testkit::id_exclusion_last(mongo.back().stage_list());
    std::string detail = std::to_string(matched) + "/" + std::to_string(steps) + " steps, " +
                         std::to_string(full_matched) + "/4 full action texts, _id exclusion last: " +
                         (id_last ? "yes" : "no");
    if (!first.empty()) detail += "; first mismatch " + first;
    return {steps == 24 && matched == 24 && full_matched == 4 && id_last, detail};
}

Outcome differential() {
    auto start = Clock::now();
    int runs = 0;
    int matched = 0;
    std::string first;
    for (std::uint64_t seed : {1, 2, 3}) {
        datagen::GeneratorSpec spec;
        spec.max = 10000;
        spec.seed = seed;
        spec.missing_rate = 0.1;
        spec.missing_attrs = {"tenPercent"};
        auto data = std::make_shared<const Table>(datagen::generate(spec));
        for (const std::string pack : {"sql", "sqlpp", "mongo"}) {
            bench::Config cfg;
            cfg.pack = load_builtin(pack);
            cfg.connector_name = "local";
            cfg.naming = bench::naming_for(pack);
            cfg.params = bench::Params::from_seed(seed);
            for (int i = 1; i <= bench::kExpressionCount; ++i) cfg.exprs.push_back(i);
            auto catalog = std::make_shared<Catalog>();
            for (const auto* name : {&cfg.naming.collection, &cfg.naming.left, &cfg.naming.right}) {
                catalog->put(cfg.naming.ns, *name, data);
            }
            cfg.connector = std::make_shared<LocalConnector>(local_dialect_for(pack), catalog);
            cfg.oracle_data = *data;
            bench::Report report = bench::run_benchmark(cfg);
            for (const auto& e : report.exprs) {
                ++runs;
                if (e.oracle_match.value_or(false)) {
                    ++matched;
                } else if (first.empty()) {
                    first = pack + " seed " + std::to_string(seed) + " expression " + std::to_string(e.id) + ": " +
                            (e.error.empty() ? e.detail : e.error);
                }
            }
        }
    }
    double took = seconds_since(start);
    std::string detail = std::to_string(matched) + "/" + std::to_string(runs) +
                         " runs match the oracle (seeds 1-3, sql/sqlpp/mongo), " + fmt_seconds(took);
    if (!first.empty()) detail += "; first mismatch " + first;
    if (took >= 60.0) detail += "; over the 60s budget";
    return {runs == 117 && matched == runs && took < 60.0, detail};
}

// Applies one random valid transformation per step.
struct ChainBuilder {
    std::mt19937_64& rng;
    Frame table;
    std::optional<Frame> expr;
    bool expr_boolean = false;
    bool expr_is_column = false;

    static const std::vector<std::string>& numeric_columns() {
        static const std::vector<std::string> cols{"ten", "two", "four", "onePercent", "unique1"};
        return cols;
    }

    std::string pick_column() {
        const auto& cols = numeric_columns();
        return cols[uniform_below(rng, cols.size())];
    }

    void step() {
        std::vector<int> choices{0, 1, 2, 3};
        // Pipeline packs compare only plain columns.
        const bool pipeline = table.pack().kind() == DialectKind::Pipeline;
        if (expr && !expr_boolean && (expr_is_column || !pipeline)) choices.push_back(4);
        if (expr && !expr_boolean && !pipeline) choices.push_back(5);
        if (expr && expr_boolean) choices.insert(choices.end(), {6, 7, 7});
        switch (choices[uniform_below(rng, choices.size())]) {
            case 0: table = table.sort(pick_column(), uniform_below(rng, 2) == 1); break;
            case 1: table = table.project(numeric_columns()); break;
            case 2:
                expr = table[pick_column()];
                expr_boolean = false;
                expr_is_column = true;
                break;
            case 3:
                expr = table[pick_column()].isna();
                expr_boolean = true;
                expr_is_column = false;
                break;
            case 4: {
                static const CompareOp ops[] = {CompareOp::Eq, CompareOp::Ne, CompareOp::Lt,
                                                CompareOp::Le, CompareOp::Gt, CompareOp::Ge};
                expr = expr->compare(ops[uniform_below(rng, 6)], Literal(static_cast<int>(uniform_below(rng, 10))));
                expr_boolean = true;
                expr_is_column = false;
                break;
            }
            case 5:
                expr = expr->arith(ArithOp::Add, Literal(1));
                expr_is_column = false;
                break;
            case 6: expr = expr->logical_not(); break;
            default:
                table = table.filter(*expr);
                expr.reset();
                break;
        }
    }
};

Table one_count_row() {
    Table t;
    t.rows.push_back(Record{{"count", Value::integer(3)}});
    return t;
}

Outcome laziness() {
    std::mt19937_64 rng(20240611);
    int chains = 0;
    std::string problem;
    for (const auto& pack_name : testkit::builtin_pack_names()) {
        auto pack = load_builtin(pack_name);
        for (int i = 0; i < 50 && problem.empty(); ++i) {
            auto spy = std::make_shared<testkit::SpyConnector>(one_count_row());
            ChainBuilder b{rng, Frame::scan("ns", "data", pack, spy), std::nullopt, false, false};
            for (int op = 0; op < 10; ++op) b.step();
            ++chains;
            if (spy->executes != 0) {
                problem = pack_name + ": transformations executed " + std::to_string(spy->executes) + " queries";
                break;
            }
            const int action = static_cast<int>(uniform_below(rng, 3));
            if (action == 0) {
                b.table.head(5);
            } else if (action == 1) {
                b.table.count();
            } else {
                b.table.collect();
            }
            if (spy->executes != 1 || spy->order != "peo") {
                problem = pack_name + ": action ran " + std::to_string(spy->executes) + " executes, phases '" +
                          spy->order + "'";
            }
        }
        if (!problem.empty()) break;
        Table distinct;
        for (const char* v : {"A", "H"}) distinct.rows.push_back(Record{{"string4", Value::string(v)}});
        auto spy = std::make_shared<testkit::SpyConnector>(distinct);
        Frame f = Frame::scan("ns", "data", pack, spy);
        Frame dummies = f.get_dummies("string4");
        dummies.head(5);
        if (spy->executes != 2) {
            problem = pack_name + ": get_dummies plus head ran " + std::to_string(spy->executes) + " executes";
            break;
        }
    }
    std::string detail = std::to_string(chains) + " random 10-op chains over 4 packs";
    if (!problem.empty()) return {false, detail + "; " + problem};
    return {true, detail + ": 0 executes before each action, exactly 1 per action, 2 for get_dummies"};
}

Outcome generator() {
    auto start = Clock::now();
    datagen::GeneratorSpec spec;
    spec.max = 100000;
    spec.seed = 1;
    spec.missing_rate = 0.0;
    Table t = datagen::generate(spec);
    auto check = testkit::check_wisconsin(t);
    bool buckets = check.one_percent_histogram.size() == 100;
    for (const auto& [bucket, n] : check.one_percent_histogram) buckets = buckets && n == 1000;
    std::ostringstream a;
    std::ostringstream b;
    datagen::write_jsonl(spec, a);
    datagen::write_jsonl(spec, b);
    bool identical = a.str() == b.str() && json_io::read(a.str()) == t;
    double took = seconds_since(start);
    std::string detail = std::string("bijection ") + (check.bijective ? "ok" : "broken") + ", " +
                         std::to_string(check.identity_failures.size()) + " identities " +
                         (check.identities_hold() ? "hold" : "violated") + ", onePercent buckets " +
                         (buckets ? "all 1000" : "uneven") + ", regeneration " +
                         (identical ? "byte-identical" : "differs") + ", " + fmt_seconds(took);
    if (!check.first_problem.empty()) detail += "; " + check.first_problem;
    return {check.bijective && check.identities_hold() && check.identity_failures.size() == 14 && buckets &&
                identical && took < 30.0,
            detail};
}

Outcome pack_validation() {
    int clean = 0;
    int deletions = 0;
    int named = 0;
    std::string problem;
    for (const auto& name : builtin_pack_names()) {
        auto pack = load_builtin(name);
        auto diags = validate_pack(*pack);
        if (diags.empty()) {
            ++clean;
        } else if (problem.empty()) {
            problem = name + ": " + diags.front().to_string();
        }
        for (const auto& [section, key] : rule_registry()) {
            ++deletions;
            auto broken = validate_pack(pack->without_rule(section, key));
            bool hit = false;
            for (const auto& d : broken) hit = hit || (d.section == section && d.key == key);
            if (hit) {
                ++named;
            } else if (problem.empty()) {
                problem = name + ": deleting " + section + "/" + key + " went unreported";
            }
        }
    }
    std::string detail = std::to_string(clean) + "/4 packs clean, " + std::to_string(named) + "/" +
                         std::to_string(deletions) + " single-key deletions named";
    if (!problem.empty()) detail += "; " + problem;
    return {clean == 4 && named == deletions && deletions > 0, detail};
}

Outcome escaping() {
    testkit::EscapeCase first;
    const int cases = 20000;
    int failures = testkit::run_escape_oracle(7, cases, &first);
    std::string lookup = substitute(Template::parse("\"$$$$lookup_var\""), {{"lookup_var", "left"}});
    bool direct = lookup == "\"$$left\"";
    std::string detail = std::to_string(cases - failures) + "/" + std::to_string(cases) +
                         " randomized templates agree with the token oracle, $$lookup_var renders " + lookup;
    if (failures > 0) detail += "; first failure on template [" + first.source + "]";
    return {failures == 0 && direct, detail};
}

Outcome http_connector() {
    testkit::HttpStub stub;
    HttpEndpointConfig cfg;
    cfg.base_url = stub.base_url();
    cfg.response_rows_pointer = "/rows";
    cfg.timeout_ms = 2000;
    HttpConnector conn(cfg);

    stub.set_reply({200, R"({"rows":[{"a":1},{"a":2,"b":"x"}]})"});
    Table t = run_query(conn, QueryText::text("SELECT * FROM data"));
    bool round_trip = t.size() == 2 && t.rows[1].get("b") == Value::string("x") &&
                      stub.last_body() == "SELECT * FROM data";

    stub.set_reply({503, "backend unavailable", "text/plain"});
    bool status_reported = false;
    try {
        run_query(conn, QueryText::text("SELECT 42"));
    } catch (const ConnectorError& e) {
        status_reported = e.query() == "SELECT 42" && std::string(e.what()).find("503") != std::string::npos;
    }

    const long timeout_ms = 400;
    HttpEndpointConfig slow_cfg = cfg;
    slow_cfg.timeout_ms = timeout_ms;
    HttpConnector slow(slow_cfg);
    stub.set_reply({200, R"({"rows":[]})", "application/json", 5000});
    bool timed_out = false;
    auto start = Clock::now();
    try {
        run_query(slow, QueryText::text("SLOW"));
    } catch (const ConnectorError& e) {
        timed_out = std::string(e.what()).find("timed out") != std::string::npos && e.query() == "SLOW";
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    bool within = timed_out && elapsed < 2 * timeout_ms;
    std::string detail = std::string("round trip ") + (round_trip ? "ok" : "failed") + ", non-2xx " +
                         (status_reported ? "reported with query" : "not reported") + ", timeout " +
                         std::to_string(timeout_ms) + "ms fired after " + std::to_string(elapsed) + "ms";
    return {round_trip && status_reported && within, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"golden translation suite", golden_translations},
        {"incremental chain replay", chain_replay},
        {"differential semantics", differential},
        {"laziness", laziness},
        {"generator properties", generator},
        {"pack validation", pack_validation},
        {"template escaping", escaping},
        {"http connector", http_connector},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
