#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "frameql/query_text.h"
#include "frameql/value.h"

namespace frameql {

using ConnectorConfig = std::map<std::string, std::string>;

/// What execute() hands to post_process(): rows already decoded, or a raw
/// response body still to be decoded.
struct RawResult {
    std::variant<Table, std::string> payload;
};

/// Execution boundary. Actions call pre_process, execute and post_process
/// exactly once each, in that order.
class Connector {
public:
    virtual ~Connector() = default;

    virtual void initialize(const ConnectorConfig& config);
    /// Pure. Text passes through; a stage list becomes `ns.coll.aggregate([...])`.
    virtual QueryText pre_process(const QueryText& query) const;
    virtual RawResult execute(const QueryText& query) = 0;
    /// Identity on decoded tables; raw bodies are parsed as JSON lines.
    virtual Table post_process(RawResult raw) const;
};

using ConnectorPtr = std::shared_ptr<Connector>;

/// Runs the three phases, attaching the rendered query to any failure.
Table run_query(Connector& connector, const QueryText& query);

/// Records every executed query and returns empty tables.
class DryRunConnector : public Connector {
public:
    RawResult execute(const QueryText& query) override;

    std::vector<std::string> log() const;
    void clear();

private:
    mutable std::mutex mu_;
    std::vector<std::string> log_;
};

}  // namespace frameql
