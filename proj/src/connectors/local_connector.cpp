#include "frameql/local_connector.h"

#include "frameql/error.h"
#include "frameql/pipeline.h"
#include "frameql/sql.h"

namespace frameql {

LocalDialect local_dialect_for(const std::string& pack_name) {
    if (pack_name == "sql") return LocalDialect::Sql;
    if (pack_name == "sqlpp") return LocalDialect::SqlPlusPlus;
    if (pack_name == "mongo") return LocalDialect::Pipeline;
    throw Error("unsupported dialect for local execution: '" + pack_name + "'");
}

LocalConnector::LocalConnector(LocalDialect dialect, std::shared_ptr<Catalog> catalog, WriteOptions options)
    : dialect_(dialect), catalog_(std::move(catalog)), options_(options) {
    if (!catalog_) throw Error("local connector needs a catalog");
}

RawResult LocalConnector::execute(const QueryText& query) {
    std::lock_guard lock(mu_);
    const std::string text = query.render();
    try {
        if (dialect_ == LocalDialect::Pipeline) {
            auto call = pipeline::parse_aggregate_call(text);
            return RawResult{pipeline::eval(call.pipeline, *catalog_, call.ns, call.collection, options_)};
        }
        auto d = dialect_ == LocalDialect::Sql ? sql::Dialect::Sql : sql::Dialect::SqlPlusPlus;
        return RawResult{sql::eval(sql::parse(text, d), *catalog_, options_)};
    } catch (const ParseError& e) {
        throw ConnectorError(std::string("parse error: ") + e.what(), text);
    } catch (const EvalError& e) {
        throw ConnectorError(std::string("evaluation error: ") + e.what(), text);
    }
}

}  // namespace frameql
