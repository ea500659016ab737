#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "frameql/language_pack.h"

namespace frameql {

using PackPtr = std::shared_ptr<const LanguagePack>;

/// Names of the packs compiled into the library.
std::vector<std::string> builtin_pack_names();

/// Parsed built-in pack; the same instance is returned on every call.
PackPtr load_builtin(std::string_view name);

/// Parses and validates a pack file. Throws ValidationError carrying every
/// diagnostic when the pack is incomplete.
LanguagePack load_user_pack(const std::filesystem::path& path);
/// Same, from text already in memory.
LanguagePack load_user_pack_text(std::string_view text);

/// Name -> pack lookup with built-in names reserved.
class PackCatalog {
public:
    PackCatalog();

    PackPtr get(std::string_view name) const;
    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;

    /// Registers a user pack; rejects built-in names and duplicates.
    PackPtr add(std::string name, LanguagePack pack);
    PackPtr add_file(const std::filesystem::path& path);

private:
    std::map<std::string, PackPtr, std::less<>> packs_;
};

namespace detail {
/// (stem, file text) for every embedded pack; generated at build time.
const std::vector<std::pair<std::string, std::string>>& embedded_packs();
}  // namespace detail

}  // namespace frameql
