#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "frameql/catalog.h"
#include "frameql/connector.h"

namespace frameql {

enum class LocalDialect { Sql, SqlPlusPlus, Pipeline };

/// Maps a pack name (sql, sqlpp, mongo) to its executor dialect. Any other
/// name, cypher included, throws Error.
LocalDialect local_dialect_for(const std::string& pack_name);

/// Executes queries with the in-process interpreters against a catalog.
/// Calls are serialized.
class LocalConnector : public Connector {
public:
    LocalConnector(LocalDialect dialect, std::shared_ptr<Catalog> catalog, WriteOptions options = {});

    RawResult execute(const QueryText& query) override;

    LocalDialect dialect() const noexcept { return dialect_; }
    std::shared_ptr<Catalog> catalog() const { return catalog_; }

private:
    LocalDialect dialect_;
    std::shared_ptr<Catalog> catalog_;
    WriteOptions options_;
    std::mutex mu_;
};

}  // namespace frameql
