#include "frameql/catalog.h"

#include "frameql/error.h"
#include "frameql/query_text.h"

namespace frameql {

void Catalog::put(std::string ns, std::string name, Table table) {
    put(std::move(ns), std::move(name), std::make_shared<const Table>(std::move(table)));
}

void Catalog::put(std::string ns, std::string name, std::shared_ptr<const Table> table) {
    tables_[{std::move(ns), std::move(name)}] = std::move(table);
}

bool Catalog::contains(const std::string& ns, const std::string& name) const {
    return tables_.count({ns, name}) != 0;
}

const Table& Catalog::get(const std::string& ns, const std::string& name) const { return *get_shared(ns, name); }

std::shared_ptr<const Table> Catalog::get_shared(const std::string& ns, const std::string& name) const {
    auto it = tables_.find({ns, name});
    if (it == tables_.end()) throw EvalError("unknown collection '" + qualified_name(ns, name) + "'");
    return it->second;
}

void Catalog::erase(const std::string& ns, const std::string& name) { tables_.erase({ns, name}); }

std::vector<Catalog::Key> Catalog::names() const {
    std::vector<Key> out;
    for (const auto& [k, t] : tables_) out.push_back(k);
    return out;
}

void write_collection(Catalog& catalog, const std::string& ns, const std::string& name, Table table,
                      const WriteOptions& options) {
    if (catalog.contains(ns, name) && !options.allow_overwrite) {
        throw EvalError("collection '" + qualified_name(ns, name) + "' already exists");
    }
    catalog.put(ns, name, std::move(table));
}

}  // namespace frameql
