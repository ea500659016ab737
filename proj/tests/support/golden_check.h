#pragma once

#include <memory>
#include <string>
#include <vector>

#include "frameql/bench.h"
#include "frameql/connector.h"
#include "frameql/frame.h"
#include "frameql/json_io.h"
#include "frameql/pack_catalog.h"

namespace frameql::testkit {

inline const std::vector<std::string>& builtin_pack_names() {
    static const std::vector<std::string> names{"sqlpp", "sql", "cypher", "mongo"};
    return names;
}

struct Comparison {
    std::string label;
    bool match = false;
    std::string got;
    std::string want;
};

/// Dry-runs all 13 expressions with symbolic parameters and compares each
/// final query with the corrected reference text.
inline std::vector<Comparison> compare_benchmark(const bench::GoldenSet& goldens, const std::string& pack_name) {
    auto pack = load_builtin(pack_name);
    bench::Config cfg;
    cfg.pack = pack;
    cfg.connector = std::make_shared<DryRunConnector>();
    cfg.connector_name = "dryrun";
    cfg.naming = bench::naming_for(pack_name);
    cfg.symbolic = true;
    for (int i = 1; i <= bench::kExpressionCount; ++i) cfg.exprs.push_back(i);
    bench::Report report = bench::run_benchmark(cfg);
    std::vector<Comparison> out;
    for (const auto& e : report.exprs) {
        Comparison c;
        c.label = pack_name + " expression " + std::to_string(e.id);
        std::string file = bench::GoldenSet::benchmark_file(pack_name, e.id);
        c.want = bench::normalize_query(goldens.corrected(file), pack->kind());
        c.got = e.queries.empty() ? std::string("<no query: " + e.error + ">")
                                  : bench::normalize_query(e.queries.back(), pack->kind());
        c.match = e.error.empty() && c.got == c.want;
        out.push_back(std::move(c));
    }
    return out;
}

/// The six frames of the reference chain: scan, column, mask, filter,
/// projection, and the head(10) action query.
inline std::vector<QueryText> chain_queries(const std::string& pack_name) {
    auto pack = load_builtin(pack_name);
    Frame af = Frame::scan("Test", "Users", pack, std::make_shared<DryRunConnector>());
    Frame lang = af["lang"];
    Frame mask = af["lang"] == "en";
    Frame filtered = af[af["lang"] == "en"];
    Frame projected = filtered[std::vector<std::string>{"name", "address"}];
    return {af.query(), lang.query(), mask.query(), filtered.query(), projected.query(), projected.head_query(10)};
}

/// Six step comparisons plus the full action text.
inline std::vector<Comparison> compare_chain(const bench::GoldenSet& goldens, const std::string& pack_name) {
    auto kind = load_builtin(pack_name)->kind();
    auto got = chain_queries(pack_name);
    auto want = bench::expand_chain(goldens.corrected("chain/" + pack_name + ".txt"));
    std::vector<Comparison> out;
    for (std::size_t i = 0; i < got.size(); ++i) {
        Comparison c;
        c.label = pack_name + " step " + std::to_string(i + 1);
        c.got = bench::normalize_query(got[i].fragment(), kind);
        c.want = i < want.size() ? bench::normalize_query(want[i], kind) : "<missing step>";
        c.match = c.got == c.want;
        out.push_back(std::move(c));
    }
    Comparison full;
    full.label = pack_name + " full action text";
    full.got = bench::normalize_query(got.back().render(), kind);
    full.want = bench::normalize_query(goldens.corrected("chain_full/" + pack_name + ".txt"), kind);
    full.match = full.got == full.want;
    out.push_back(std::move(full));
    return out;
}

/// In a pipeline action query the `_id` exclusion follows every other
/// $project stage and, when a $limit is present, sits right before it.
inline bool id_exclusion_last(const std::vector<std::string>& stages) {
    int exclusion = -1;
    int last_other_project = -1;
    int limit = -1;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        auto j = json_io::Json::parse(stages[i]);
        if (!j.is_object() || j.size() != 1) return false;
        const std::string name = j.begin().key();
        const auto& body = j.begin().value();
        if (name == "$project") {
            bool is_exclusion = body.size() == 1 && body.contains("_id") && body["_id"] == 0;
            if (is_exclusion) {
                exclusion = static_cast<int>(i);
            } else {
                last_other_project = static_cast<int>(i);
            }
        } else if (name == "$limit") {
            limit = static_cast<int>(i);
        }
    }
    if (exclusion < 0 || exclusion < last_other_project) return false;
    return limit < 0 || limit == exclusion + 1;
}

}  // namespace frameql::testkit
