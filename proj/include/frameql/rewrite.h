#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace frameql {

/// Variable name -> already-rendered fragment. Bound values are copied
/// verbatim; they are never rescanned for variables.
using VarBindings = std::map<std::string, std::string, std::less<>>;

/// Names a `$variable` may take inside a rule template.
const std::vector<std::string>& variable_vocabulary();

/// A rule template: literal text interleaved with variables.
///
/// Lexing rules:
///  - `$name` is a variable when a vocabulary name is a prefix of the
///    identifier (longest wins); the rest of the identifier stays literal.
///  - `$$` emits one literal `$`; an identifier directly after it is read as a
///    variable, so `$$left` renders as `$` followed by the value of `left`.
///  - `$name` with no vocabulary match is literal text when the `$` directly
///    follows a `"` (pipeline operators such as `"$match"`), otherwise it is an
///    unknown variable and rendering fails.
class Template {
public:
    struct Token {
        enum class Kind { Literal, Variable, Unknown };
        Kind kind;
        std::string text;

        friend bool operator==(const Token&, const Token&) = default;
    };

    Template() = default;
    static Template parse(std::string_view source);
    static Template literal(std::string text);

    const std::vector<Token>& tokens() const noexcept { return tokens_; }
    const std::string& source() const noexcept { return source_; }
    std::vector<std::string> variables() const;
    std::vector<std::string> unknown_variables() const;

    friend bool operator==(const Template&, const Template&) = default;

private:
    void push_literal(std::string_view text);

    std::string source_;
    std::vector<Token> tokens_;
};

/// Renders `t`; throws Error naming the first unbound or unknown variable.
std::string substitute(const Template& t, const VarBindings& bindings);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

/// Removes whitespace outside double-quoted string literals; used to compare
/// JSON-shaped pipeline text whose spacing is insignificant.
std::string strip_json_whitespace(std::string_view text);

}  // namespace frameql
