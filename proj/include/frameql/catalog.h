#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "frameql/value.h"

namespace frameql {

/// In-memory collections keyed by (namespace, name). The same table may be
/// registered under several names without copying.
class Catalog {
public:
    using Key = std::pair<std::string, std::string>;

    void put(std::string ns, std::string name, Table table);
    void put(std::string ns, std::string name, std::shared_ptr<const Table> table);
    bool contains(const std::string& ns, const std::string& name) const;
    /// Throws EvalError naming the collection when absent.
    const Table& get(const std::string& ns, const std::string& name) const;
    std::shared_ptr<const Table> get_shared(const std::string& ns, const std::string& name) const;
    void erase(const std::string& ns, const std::string& name);
    std::vector<Key> names() const;

private:
    std::map<Key, std::shared_ptr<const Table>> tables_;
};

/// Options for statements that write to the catalog.
struct WriteOptions {
    bool allow_overwrite = false;
};

/// Writes `table` as (ns, name), honouring the overwrite flag.
void write_collection(Catalog& catalog, const std::string& ns, const std::string& name, Table table,
                      const WriteOptions& options);

}  // namespace frameql
