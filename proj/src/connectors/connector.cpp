#include "frameql/connector.h"

#include "frameql/error.h"
#include "frameql/json_io.h"

namespace frameql {

void Connector::initialize(const ConnectorConfig&) {}

QueryText Connector::pre_process(const QueryText& query) const {
    if (query.is_text()) return query;
    return QueryText::text(query.render());
}

Table Connector::post_process(RawResult raw) const {
    if (auto* t = std::get_if<Table>(&raw.payload)) return std::move(*t);
    return json_io::read(std::get<std::string>(raw.payload));
}

Table run_query(Connector& connector, const QueryText& query) {
    const QueryText prepared = connector.pre_process(query);
    try {
        return connector.post_process(connector.execute(prepared));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ConnectorError(e.what(), prepared.render());
    }
}

RawResult DryRunConnector::execute(const QueryText& query) {
    std::lock_guard lock(mu_);
    log_.push_back(query.render());
    return RawResult{Table{}};
}

std::vector<std::string> DryRunConnector::log() const {
    std::lock_guard lock(mu_);
    return log_;
}

void DryRunConnector::clear() {
    std::lock_guard lock(mu_);
    log_.clear();
}

}  // namespace frameql
