#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frameql/rewrite.h"

namespace frameql {

enum class DialectKind { Text, Pipeline };

/// Section names of the canonical rule registry.
namespace section {
inline constexpr std::string_view kPack = "PACK";
inline constexpr std::string_view kQueries = "QUERIES";
inline constexpr std::string_view kAttributes = "ATTRIBUTE ALIAS";
inline constexpr std::string_view kArithmetic = "ARITHMETIC STATEMENTS";
inline constexpr std::string_view kLogical = "LOGICAL STATEMENTS";
inline constexpr std::string_view kComparison = "COMPARISON STATEMENTS";
inline constexpr std::string_view kConversion = "TYPE CONVERSION";
inline constexpr std::string_view kLimit = "LIMIT";
inline constexpr std::string_view kFunctions = "FUNCTIONS";
inline constexpr std::string_view kGroupAggregates = "GROUP AGGREGATES";
inline constexpr std::string_view kScalarFunctions = "SCALAR FUNCTIONS";
inline constexpr std::string_view kNullCheck = "NULL CHECK";
inline constexpr std::string_view kLiterals = "LITERALS";
inline constexpr std::string_view kAliases = "ALIASES";
inline constexpr std::string_view kSave = "SAVE RESULTS";
}  // namespace section

/// Every (section, key) a pack must define.
const std::vector<std::pair<std::string, std::string>>& rule_registry();

struct RuleDiagnostic {
    std::string section;
    std::string key;
    std::string variable;  // empty unless the diagnostic is about a variable
    std::size_t line = 0;
    std::string message;

    std::string to_string() const;
};

/// Parsed language configuration file: section -> key -> template.
class LanguagePack {
public:
    struct Rule {
        Template tmpl;
        std::size_t line = 0;

        friend bool operator==(const Rule&, const Rule&) = default;
    };
    using Section = std::map<std::string, Rule, std::less<>>;

    const std::string& name() const noexcept { return name_; }
    DialectKind kind() const noexcept { return kind_; }
    const std::map<std::string, Section, std::less<>>& sections() const noexcept { return sections_; }

    /// Null when the rule is absent.
    const Template* find(std::string_view section, std::string_view key) const;
    /// Throws Error naming section/key when absent.
    const Template& at(std::string_view section, std::string_view key) const;

    /// Returns a copy with one rule replaced (or added).
    LanguagePack with_rule(std::string_view section, std::string_view key, std::string_view source) const;
    /// Returns a copy with one rule removed.
    LanguagePack without_rule(std::string_view section, std::string_view key) const;

    friend bool operator==(const LanguagePack&, const LanguagePack&) = default;

private:
    friend LanguagePack parse_config(std::string_view text, bool strict);

    std::string name_;
    DialectKind kind_ = DialectKind::Text;
    std::map<std::string, Section, std::less<>> sections_;
};

/// Parses the configuration grammar:
///   [SECTION]            header alone on a line
///   key = value          entry
///       more value       continuation (indented)
///   ; or # comment
/// The optional [PACK] section carries `name` and `kind` (text | pipeline).
/// `[ATTRIBUTES]` is accepted as an alias of `[ATTRIBUTE ALIAS]`.
/// When `strict`, unknown variables raise ValidationError; otherwise they are
/// kept and reported by validate_pack.
LanguagePack parse_config(std::string_view text, bool strict = true);

/// Empty iff every registry rule exists and every variable is known.
std::vector<RuleDiagnostic> validate_pack(const LanguagePack& pack);

std::string build_rule(const LanguagePack& pack, std::string_view section, std::string_view key,
                       const VarBindings& bindings);

/// Folds fragments right-to-left through ATTRIBUTE ALIAS.attribute_separator.
std::string chain_attributes(std::span<const std::string> items, const LanguagePack& pack);

}  // namespace frameql
