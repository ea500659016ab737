#include "frameql/pack_catalog.h"

#include <fstream>
#include <mutex>
#include <sstream>

#include "frameql/error.h"

namespace frameql {

std::vector<std::string> builtin_pack_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : detail::embedded_packs()) out.push_back(name);
    return out;
}

PackPtr load_builtin(std::string_view name) {
    static std::mutex mu;
    static std::map<std::string, PackPtr, std::less<>> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(name); it != cache.end()) return it->second;
    for (const auto& [stem, text] : detail::embedded_packs()) {
        if (stem != name) continue;
        auto pack = std::make_shared<const LanguagePack>(parse_config(text));
        cache.emplace(stem, pack);
        return pack;
    }
    throw Error("unknown built-in pack '" + std::string(name) + "'");
}

LanguagePack load_user_pack_text(std::string_view text) {
    LanguagePack pack = parse_config(text, /*strict=*/false);
    auto diags = validate_pack(pack);
    if (!diags.empty()) {
        std::vector<std::string> lines;
        for (const auto& d : diags) lines.push_back(d.to_string());
        std::string what = "pack failed validation: " + lines.front();
        if (lines.size() > 1) what += " (+" + std::to_string(lines.size() - 1) + " more)";
        throw ValidationError(what, std::move(lines));
    }
    return pack;
}

LanguagePack load_user_pack(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read pack file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_user_pack_text(ss.str());
}

PackCatalog::PackCatalog() {
    for (const auto& name : builtin_pack_names()) packs_.emplace(name, load_builtin(name));
}

PackPtr PackCatalog::get(std::string_view name) const {
    auto it = packs_.find(name);
    if (it == packs_.end()) throw Error("no pack named '" + std::string(name) + "'");
    return it->second;
}

bool PackCatalog::contains(std::string_view name) const { return packs_.find(name) != packs_.end(); }

std::vector<std::string> PackCatalog::names() const {
    std::vector<std::string> out;
    for (const auto& [n, p] : packs_) out.push_back(n);
    return out;
}

PackPtr PackCatalog::add(std::string name, LanguagePack pack) {
    for (const auto& b : builtin_pack_names())
        if (b == name) throw Error("pack name '" + name + "' is reserved for a built-in pack");
    if (packs_.count(name)) throw Error("pack '" + name + "' is already registered");
    auto ptr = std::make_shared<const LanguagePack>(std::move(pack));
    packs_.emplace(std::move(name), ptr);
    return ptr;
}

PackPtr PackCatalog::add_file(const std::filesystem::path& path) {
    LanguagePack pack = load_user_pack(path);
    std::string name = pack.name().empty() ? path.stem().string() : pack.name();
    return add(std::move(name), std::move(pack));
}

}  // namespace frameql
