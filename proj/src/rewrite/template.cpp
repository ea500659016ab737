#include "frameql/rewrite.h"

#include <algorithm>
#include <cctype>

#include "frameql/error.h"

namespace frameql {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Longest vocabulary name that prefixes `ident`; empty when none does.
std::string_view vocabulary_prefix(std::string_view ident) {
    std::string_view best;
    for (const auto& name : variable_vocabulary()) {
        if (name.size() > best.size() && ident.substr(0, name.size()) == name) {
            best = name;
        }
    }
    return best;
}

}  // namespace

const std::vector<std::string>& variable_vocabulary() {
    static const std::vector<std::string> kVocabulary = {
        "subquery",       "agg_func",        "agg_expr",       "agg_name",
        "attribute",      "attribute_alias", "alias",          "namespace",
        "collection",     "source",          "left",           "right",
        "num",            "statement",       "sort_asc_attr",  "sort_desc_attr",
        "group_attr",     "group_key",       "op",             "value",
        "left_subquery",  "right_subquery",  "left_source",    "right_source",
        "left_collection", "right_collection", "left_on",      "right_on",
        "lookup_var",
    };
    return kVocabulary;
}

void Template::push_literal(std::string_view text) {
    if (text.empty()) return;
    if (!tokens_.empty() && tokens_.back().kind == Token::Kind::Literal) {
        tokens_.back().text += text;
    } else {
        tokens_.push_back({Token::Kind::Literal, std::string(text)});
    }
}

Template Template::literal(std::string text) {
    Template t;
    t.source_ = text;
    t.push_literal(text);
    return t;
}

Template Template::parse(std::string_view source) {
    Template t;
    t.source_ = std::string(source);
    std::size_t i = 0;
    const std::size_t n = source.size();
    std::size_t lit_start = 0;

    auto flush = [&](std::size_t end) {
        t.push_literal(source.substr(lit_start, end - lit_start));
    };
    auto read_ident = [&](std::size_t from) {
        std::size_t j = from;
        while (j < n && ident_char(source[j])) ++j;
        return source.substr(from, j - from);
    };

    while (i < n) {
        if (source[i] != '$') {
            ++i;
            continue;
        }
        flush(i);
        const bool quoted = i > 0 && source[i - 1] == '"';
        if (i + 1 < n && source[i + 1] == '$') {
            t.push_literal("$");
            i += 2;
            if (i < n && ident_start(source[i])) {
                const auto ident = read_ident(i);
                const auto var = vocabulary_prefix(ident);
                if (!var.empty()) {
                    t.tokens_.push_back({Token::Kind::Variable, std::string(var)});
                    t.push_literal(ident.substr(var.size()));
                } else {
                    t.push_literal(ident);
                }
                i += ident.size();
            }
        } else if (i + 1 < n && ident_start(source[i + 1])) {
            const auto ident = read_ident(i + 1);
            const auto var = vocabulary_prefix(ident);
            if (!var.empty()) {
                t.tokens_.push_back({Token::Kind::Variable, std::string(var)});
                t.push_literal(ident.substr(var.size()));
            } else if (quoted) {
                t.push_literal("$");
                t.push_literal(ident);
            } else {
                t.tokens_.push_back({Token::Kind::Unknown, std::string(ident)});
            }
            i += 1 + ident.size();
        } else {
            t.push_literal("$");
            ++i;
        }
        lit_start = i;
    }
    flush(n);
    return t;
}

std::vector<std::string> Template::variables() const {
    std::vector<std::string> out;
    for (const auto& tok : tokens_) {
        if (tok.kind == Token::Kind::Variable &&
            std::find(out.begin(), out.end(), tok.text) == out.end()) {
            out.push_back(tok.text);
        }
    }
    return out;
}

std::vector<std::string> Template::unknown_variables() const {
    std::vector<std::string> out;
    for (const auto& tok : tokens_) {
        if (tok.kind == Token::Kind::Unknown) out.push_back(tok.text);
    }
    return out;
}

std::string substitute(const Template& t, const VarBindings& bindings) {
    std::string out;
    for (const auto& tok : t.tokens()) {
        switch (tok.kind) {
        case Template::Token::Kind::Literal: out += tok.text; break;
        case Template::Token::Kind::Variable: {
            auto it = bindings.find(tok.text);
            if (it == bindings.end()) {
                throw Error("missing binding for variable $" + tok.text + " in template: " +
                            t.source());
            }
            out += it->second;
            break;
        }
        case Template::Token::Kind::Unknown:
            throw Error("unknown variable $" + tok.text + " in template: " + t.source());
        }
    }
    return out;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    }
    return out;
}

std::string strip_json_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    bool escaped = false;
    for (char c : text) {
        if (in_string) {
            out += c;
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            continue;
        }
        out += c;
    }
    return out;
}

}  // namespace frameql
