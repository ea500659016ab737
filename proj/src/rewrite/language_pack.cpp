#include "frameql/language_pack.h"

#include <algorithm>
#include <cctype>

#include "frameql/error.h"

namespace frameql {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string canonical_section(std::string_view name) {
    if (name == "ATTRIBUTES") return std::string(section::kAttributes);
    return std::string(name);
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& rule_registry() {
    static const auto kRegistry = [] {
        std::vector<std::pair<std::string, std::string>> r;
        auto add = [&r](std::string_view sec, std::initializer_list<const char*> keys) {
            for (const char* k : keys) r.emplace_back(std::string(sec), k);
        };
        // q1 scan, q2 project, q3 count-all, q4 sort-desc, q5 sort-asc, q6 filter,
        // q7 aggregate-value wrapper, q8 group-by aggregate, q9 join,
        // q10 expression projection, q11 distinct values.
        add(section::kQueries, {"q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9", "q10", "q11"});
        add(section::kAttributes, {"single_attribute", "project_attribute", "attribute_alias",
                                   "group_attribute", "single_aggregate", "aggregate_alias",
                                   "sort_asc_attr", "sort_desc_attr", "attribute_separator"});
        add(section::kArithmetic, {"add", "sub", "mul", "div", "mod"});
        add(section::kLogical, {"and", "or", "not"});
        add(section::kComparison, {"eq", "ne", "gt", "lt", "ge", "le"});
        add(section::kConversion, {"to_int", "to_str"});
        add(section::kLimit, {"limit", "return_all"});
        add(section::kFunctions, {"min", "max", "avg", "count", "std"});
        add(section::kGroupAggregates, {"min", "max", "avg", "count", "std"});
        add(section::kScalarFunctions, {"upper"});
        add(section::kNullCheck, {"isna", "notna"});
        add(section::kLiterals, {"string", "null", "true", "false"});
        add(section::kAliases, {"compare", "arithmetic", "logical", "null_check", "convert",
                                "scalar", "aggregate", "value"});
        add(section::kSave, {"to_collection"});
        return r;
    }();
    return kRegistry;
}

std::string RuleDiagnostic::to_string() const {
    std::string out = "[" + section + "]";
    if (!key.empty()) out += " " + key;
    if (line != 0) out += " (line " + std::to_string(line) + ")";
    if (!variable.empty()) out += " $" + variable;
    return out + ": " + message;
}

const Template* LanguagePack::find(std::string_view sec, std::string_view key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second.tmpl;
}

const Template& LanguagePack::at(std::string_view sec, std::string_view key) const {
    if (const Template* t = find(sec, key)) return *t;
    throw Error("pack '" + name_ + "' has no rule [" + std::string(sec) + "] " + std::string(key));
}

LanguagePack LanguagePack::with_rule(std::string_view sec, std::string_view key,
                                     std::string_view source) const {
    LanguagePack copy = *this;
    copy.sections_[std::string(sec)][std::string(key)] = Rule{Template::parse(source), 0};
    return copy;
}

LanguagePack LanguagePack::without_rule(std::string_view sec, std::string_view key) const {
    LanguagePack copy = *this;
    auto s = copy.sections_.find(sec);
    if (s != copy.sections_.end()) {
        auto k = s->second.find(key);
        if (k != s->second.end()) s->second.erase(k);
    }
    return copy;
}

LanguagePack parse_config(std::string_view text, bool strict) {
    LanguagePack pack;
    std::string current_section;
    std::string current_key;
    std::string current_value;
    std::size_t current_line = 0;
    bool in_entry = false;

    auto finish_entry = [&] {
        if (!in_entry) return;
        // Trailing blank continuation lines are not part of the value.
        while (!current_value.empty() && std::isspace(static_cast<unsigned char>(current_value.back()))) {
            current_value.pop_back();
        }
        auto& sec = pack.sections_[current_section];
        if (sec.count(current_key) != 0) {
            throw ParseError("duplicate key '" + current_key + "' in section [" + current_section + "]",
                             current_line);
        }
        LanguagePack::Rule rule{Template::parse(current_value), current_line};
        if (strict) {
            const auto unknown = rule.tmpl.unknown_variables();
            if (!unknown.empty()) {
                RuleDiagnostic d{current_section, current_key, unknown.front(), current_line,
                                 "unknown variable"};
                throw ValidationError(d.to_string(), {d.to_string()});
            }
        }
        sec.emplace(current_key, std::move(rule));
        in_entry = false;
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        const std::string_view stripped = trim(line);
        if (stripped.empty()) {
            if (in_entry) current_value += '\n';
            continue;
        }
        if (stripped.front() == ';' || stripped.front() == '#') {
            continue;
        }
        const bool indented = line.front() == ' ' || line.front() == '\t';
        if (indented) {
            if (!in_entry) {
                throw ParseError("continuation line outside of an entry", line_no);
            }
            current_value += '\n';
            current_value += line.substr(0, line.find_last_not_of(" \t") + 1);
            continue;
        }
        finish_entry();
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw ParseError("unterminated section header", line_no);
            }
            current_section = canonical_section(trim(stripped.substr(1, stripped.size() - 2)));
            pack.sections_[current_section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw ParseError("expected 'key = value'", line_no);
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty() || key.find_first_of(" \t") != std::string_view::npos) {
            throw ParseError("malformed key", line_no);
        }
        if (current_section.empty()) {
            throw ParseError("entry before any section header", line_no);
        }
        current_key = std::string(key);
        current_value = std::string(trim(line.substr(eq + 1)));
        current_line = line_no;
        in_entry = true;
    }
    finish_entry();

    if (const Template* name = pack.find(section::kPack, "name")) {
        pack.name_ = normalize_whitespace(name->source());
    }
    if (const Template* kind = pack.find(section::kPack, "kind")) {
        const std::string k = normalize_whitespace(kind->source());
        if (k == "pipeline") {
            pack.kind_ = DialectKind::Pipeline;
        } else if (k == "text") {
            pack.kind_ = DialectKind::Text;
        } else {
            throw ParseError("[PACK] kind must be 'text' or 'pipeline', got '" + k + "'");
        }
    }
    return pack;
}

std::vector<RuleDiagnostic> validate_pack(const LanguagePack& pack) {
    std::vector<RuleDiagnostic> out;
    for (const auto& [sec, key] : rule_registry()) {
        if (pack.find(sec, key) == nullptr) {
            out.push_back({sec, key, "", 0, "required rule is missing"});
        }
    }
    for (const auto& [sec_name, rules] : pack.sections()) {
        for (const auto& [key, rule] : rules) {
            for (const auto& var : rule.tmpl.unknown_variables()) {
                out.push_back({sec_name, key, var, rule.line, "unknown variable"});
            }
        }
    }
    return out;
}

std::string build_rule(const LanguagePack& pack, std::string_view sec, std::string_view key,
                       const VarBindings& bindings) {
    return substitute(pack.at(sec, key), bindings);
}

std::string chain_attributes(std::span<const std::string> items, const LanguagePack& pack) {
    if (items.empty()) {
        throw Error("chain_attributes: empty attribute list");
    }
    const Template& sep = pack.at(section::kAttributes, "attribute_separator");
    std::string acc = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) {
        acc = substitute(sep, {{"left", items[i]}, {"right", acc}});
    }
    return acc;
}

}  // namespace frameql
