#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "frameql/bench.h"
#include "frameql/catalog.h"
#include "frameql/datagen.h"
#include "frameql/error.h"
#include "frameql/http_connector.h"
#include "frameql/json_io.h"
#include "frameql/local_connector.h"

using namespace frameql;

int main(int argc, char** argv) {
    CLI::App app{"Run the dataframe benchmark expressions through a language pack and connector"};
    std::string pack_name = "sqlpp";
    std::string connector_name = "dryrun";
    std::string data_path;
    std::int64_t max = 10000;
    std::uint64_t seed = 1;
    double missing_rate = 0.0;
    std::string exprs = "1-13";
    int repeat = 1;
    std::string out_path;
    std::string golden_dir;
    std::string base_url, query_path = "/query", auth_header, rows_pointer;
    long timeout_ms = 30000;
    bool symbolic = false;
    bool no_oracle = false;

    app.add_option("--pack", pack_name, "sqlpp, sql, mongo or cypher")
        ->check(CLI::IsMember({"sqlpp", "sql", "mongo", "cypher"}));
    app.add_option("--connector", connector_name, "dryrun, local or http")
        ->check(CLI::IsMember({"dryrun", "local", "http"}));
    app.add_option("--data", data_path, "JSON-lines dataset (default: generate one)");
    app.add_option("--max", max, "Rows to generate when --data is absent")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed for data generation and expression parameters");
    app.add_option("--missing-rate", missing_rate, "Missing rate for tenPercent in generated data")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--exprs", exprs, "Expression ids, e.g. 1-13 or 3,9");
    app.add_option("--repeat", repeat, "Runs per expression; timings are medians")->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "Report file (default: stdout)");
    app.add_option("--golden-dir", golden_dir, "Compare rendered queries with the reference texts here");
    app.add_flag("--symbolic", symbolic, "Render x, y, z as symbols (dry runs)");
    app.add_flag("--no-oracle", no_oracle, "Skip the oracle comparison");
    app.add_option("--base-url", base_url, "HTTP endpoint, e.g. http://127.0.0.1:19002");
    app.add_option("--query-path", query_path, "HTTP query path");
    app.add_option("--auth-header", auth_header, "Static header, 'Name: value'");
    app.add_option("--rows-pointer", rows_pointer, "JSON pointer to the rows in the response");
    app.add_option("--timeout-ms", timeout_ms, "HTTP timeout")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        bench::Config cfg;
        cfg.pack = load_builtin(pack_name);
        cfg.connector_name = connector_name;
        cfg.naming = bench::naming_for(pack_name);
        cfg.params = bench::Params::from_seed(seed);
        cfg.exprs = bench::parse_id_list(exprs);
        cfg.repeat = repeat;
        cfg.symbolic = symbolic || (connector_name == "dryrun" && !golden_dir.empty());

        bool needs_data = connector_name == "local" || (!no_oracle && connector_name != "dryrun");
        Table data;
        if (needs_data) {
            if (!data_path.empty()) {
                data = json_io::read_file(data_path);
            } else {
                datagen::GeneratorSpec spec;
                spec.max = max;
                spec.seed = seed;
                spec.missing_rate = missing_rate;
                data = datagen::generate(spec);
            }
        }

        if (connector_name == "dryrun") {
            cfg.connector = std::make_shared<DryRunConnector>();
        } else if (connector_name == "local") {
            auto catalog = std::make_shared<Catalog>();
            auto shared = std::make_shared<const Table>(data);
            for (const auto* name : {&cfg.naming.collection, &cfg.naming.left, &cfg.naming.right}) {
                catalog->put(cfg.naming.ns, *name, shared);
            }
            cfg.connector = std::make_shared<LocalConnector>(local_dialect_for(pack_name), catalog);
        } else {
            HttpEndpointConfig http;
            http.base_url = base_url;
            http.query_path = query_path;
            if (!auth_header.empty()) http.auth_header = auth_header;
            http.timeout_ms = timeout_ms;
            http.response_rows_pointer = rows_pointer;
            cfg.connector = std::make_shared<HttpConnector>(http);
        }
        if (needs_data && !no_oracle) cfg.oracle_data = std::move(data);

        bench::Report report = bench::run_benchmark(cfg);
        if (!golden_dir.empty()) bench::check_goldens(report, bench::GoldenSet(golden_dir), cfg.pack->kind());

        const std::string text = report.to_json().dump(2) + "\n";
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw Error("cannot open '" + out_path + "' for writing");
            out << text;
        }
        bool ok = true;
        for (const auto& e : report.exprs) {
            ok = ok && e.error.empty() && e.oracle_match.value_or(true) && e.golden_match.value_or(true);
        }
        return ok ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return 1;
    }
}
