#include <cctype>
#include <charconv>
#include <unordered_set>

#include "frameql/error.h"
#include "frameql/sql.h"

namespace frameql::sql {
namespace {

enum class Tok { Ident, QuotedIdent, String, Int, Float, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t pos = 0;
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

ParseError error_at(std::string_view text, std::size_t pos, const std::string& what) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return ParseError(what, line, col);
}

std::vector<Token> lex(std::string_view text, Dialect dialect) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto quoted = [&](char q) {
        std::size_t start = i++;
        std::string body;
        while (true) {
            if (i >= text.size()) throw error_at(text, start, "unterminated quoted text");
            char c = text[i++];
            if (c == q) {
                if (i < text.size() && text[i] == q) {  // doubled quote
                    body += q;
                    ++i;
                    continue;
                }
                break;
            }
            if (c == '\\' && i < text.size()) {
                body += text[i++];
                continue;
            }
            body += c;
        }
        return body;
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
            out.push_back({Tok::Ident, std::string(text.substr(start, i - start)), start});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            bool real = false;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i + 1 < text.size() && text[i] == '.' && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
                real = true;
                ++i;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            }
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                    real = true;
                    i = j;
                    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                }
            }
            out.push_back({real ? Tok::Float : Tok::Int, std::string(text.substr(start, i - start)), start});
            continue;
        }
        if (c == '\'') {
            out.push_back({Tok::String, quoted('\''), start});
            continue;
        }
        if (c == '"') {
            auto body = quoted('"');
            out.push_back({dialect == Dialect::Sql ? Tok::QuotedIdent : Tok::String, std::move(body), start});
            continue;
        }
        if (c == '`') {
            if (dialect == Dialect::Sql) throw error_at(text, start, "backtick identifiers are not supported");
            out.push_back({Tok::QuotedIdent, quoted('`'), start});
            continue;
        }
        static const char* two[] = {"<>", "!=", "<=", ">=", "=="};
        bool matched = false;
        for (const char* s : two) {
            if (text.substr(i, 2) == s) {
                out.push_back({Tok::Symbol, s, start});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view("(),.*=<>+-/%;").find(c) != std::string_view::npos) {
            out.push_back({Tok::Symbol, std::string(1, c), start});
            ++i;
            continue;
        }
        throw error_at(text, start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", text.size()});
    return out;
}

const std::unordered_set<std::string>& reserved() {
    static const std::unordered_set<std::string> words = {
        "SELECT", "FROM",  "WHERE", "GROUP", "BY",    "ORDER",   "ASC",     "DESC",  "LIMIT",
        "AS",     "JOIN",  "INNER", "ON",    "AND",   "OR",      "NOT",     "IS",    "NULL",
        "TRUE",   "FALSE", "CAST",  "CREATE", "TABLE", "INSERT", "INTO",    "MISSING", "UNKNOWN"};
    return words;
}

const std::unordered_set<std::string>& aggregates() {
    static const std::unordered_set<std::string> names = {"COUNT", "MIN", "MAX", "AVG", "SUM", "STDDEV_POP"};
    return names;
}

const std::unordered_set<std::string>& scalars() {
    static const std::unordered_set<std::string> names = {"UPPER", "LOWER", "TO_BIGINT", "TO_STRING", "ABS"};
    return names;
}

class Parser {
public:
    Parser(std::string_view text, Dialect dialect) : text_(text), dialect_(dialect), toks_(lex(text, dialect)) {}

    Statement statement() {
        Statement st;
        st.dialect = dialect_;
        if (keyword("CREATE")) {
            expect_keyword("TABLE");
            st.kind = Statement::Kind::CreateTableAs;
            table_name(st.target_ns, st.target_name);
            expect_keyword("AS");
            bool paren = symbol("(");
            st.select = select();
            if (paren) expect_symbol(")");
        } else if (keyword("INSERT")) {
            expect_keyword("INTO");
            st.kind = Statement::Kind::InsertInto;
            table_name(st.target_ns, st.target_name);
            bool paren = symbol("(");
            st.select = select();
            if (paren) expect_symbol(")");
        } else {
            st.select = select();
        }
        symbol(";");
        if (peek().kind != Tok::End) throw fail("unexpected trailing input");
        return st;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t k = std::min(at_ + ahead, toks_.size() - 1);
        return toks_[k];
    }
    Token next() { return toks_[at_ < toks_.size() - 1 ? at_++ : at_]; }

    ParseError fail(const std::string& what) const {
        const Token& t = peek();
        std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        return error_at(text_, t.pos, what + " near " + near);
    }

    bool is_keyword(const Token& t, const char* kw) const { return t.kind == Tok::Ident && upper(t.text) == kw; }
    bool keyword(const char* kw) {
        if (is_keyword(peek(), kw)) {
            ++at_;
            return true;
        }
        return false;
    }
    void expect_keyword(const char* kw) {
        if (!keyword(kw)) throw fail(std::string("expected ") + kw);
    }
    bool symbol(const char* s) {
        if (peek().kind == Tok::Symbol && peek().text == s) {
            ++at_;
            return true;
        }
        return false;
    }
    void expect_symbol(const char* s) {
        if (!symbol(s)) throw fail(std::string("expected '") + s + "'");
    }

    bool identifier_token(const Token& t) const {
        if (t.kind == Tok::QuotedIdent) return true;
        return t.kind == Tok::Ident && !reserved().count(upper(t.text));
    }
    std::string identifier(const char* what) {
        if (!identifier_token(peek())) throw fail(std::string("expected ") + what);
        return next().text;
    }

    void table_name(std::string& ns, std::string& name) {
        name = identifier("table name");
        if (symbol(".")) {
            ns = name;
            name = identifier("table name");
        }
    }

    std::shared_ptr<const Select> select() {
        auto sel = std::make_shared<Select>();
        expect_keyword("SELECT");
        bool value_column = peek(1).kind == Tok::Symbol && peek(1).text == ",";
        value_column = value_column || is_keyword(peek(1), "FROM") || is_keyword(peek(1), "AS");
        if (is_keyword(peek(), "VALUE") && !value_column) {
            if (dialect_ == Dialect::Sql) throw fail("SELECT VALUE is not supported in this dialect");
            ++at_;
            sel->value_mode = true;
            SelectItem item;
            item.expr = expr();
            sel->items.push_back(std::move(item));
        } else {
            do {
                sel->items.push_back(select_item());
            } while (symbol(","));
        }
        expect_keyword("FROM");
        sel->from = source();
        if (keyword("WHERE")) sel->where = expr();
        if (keyword("GROUP")) {
            expect_keyword("BY");
            do {
                sel->group_by.push_back(expr());
            } while (symbol(","));
        }
        if (keyword("ORDER")) {
            expect_keyword("BY");
            do {
                OrderKey key;
                key.expr = expr();
                if (keyword("DESC")) {
                    key.descending = true;
                } else {
                    keyword("ASC");
                }
                sel->order_by.push_back(std::move(key));
            } while (symbol(","));
        }
        if (keyword("LIMIT")) {
            if (peek().kind != Tok::Int) throw fail("expected integer after LIMIT");
            Token t = next();
            std::int64_t n = 0;
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
            sel->limit = n;
        }
        return sel;
    }

    SelectItem select_item() {
        SelectItem item;
        if (symbol("*")) {
            item.kind = SelectItem::Kind::Star;
            return item;
        }
        if (identifier_token(peek()) && peek(1).kind == Tok::Symbol && peek(1).text == "." &&
            peek(2).kind == Tok::Symbol && peek(2).text == "*") {
            item.kind = SelectItem::Kind::QualifiedStar;
            item.qualifier = next().text;
            at_ += 2;
            return item;
        }
        item.expr = expr();
        if (keyword("AS")) item.alias = identifier("alias");
        return item;
    }

    Source primary_source() {
        Source src;
        if (symbol("(")) {
            src.kind = Source::Kind::Subquery;
            src.subquery = select();
            expect_symbol(")");
            keyword("AS");
            src.alias = identifier("subquery alias");
            return src;
        }
        src.kind = Source::Kind::Table;
        table_name(src.ns, src.name);
        if (keyword("AS")) {
            src.alias = identifier("alias");
        } else if (identifier_token(peek())) {
            src.alias = next().text;
        } else {
            src.alias = src.name;
        }
        return src;
    }

    Source source() {
        Source left = primary_source();
        while (is_keyword(peek(), "JOIN") || is_keyword(peek(), "INNER")) {
            if (keyword("INNER")) {
                expect_keyword("JOIN");
            } else {
                ++at_;
            }
            Source join;
            join.kind = Source::Kind::Join;
            join.left = std::make_shared<Source>(std::move(left));
            join.right = std::make_shared<Source>(primary_source());
            expect_keyword("ON");
            join.on = expr();
            left = std::move(join);
        }
        return left;
    }

    ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

    ExprPtr expr() { return or_expr(); }

    ExprPtr or_expr() {
        ExprPtr lhs = and_expr();
        while (true) {
            std::size_t pos = peek().pos;
            if (!keyword("OR")) return lhs;
            Expr e;
            e.kind = Expr::Kind::Or;
            e.pos = pos;
            e.args = {lhs, and_expr()};
            lhs = make(std::move(e));
        }
    }

    ExprPtr and_expr() {
        ExprPtr lhs = not_expr();
        while (true) {
            std::size_t pos = peek().pos;
            if (!keyword("AND")) return lhs;
            Expr e;
            e.kind = Expr::Kind::And;
            e.pos = pos;
            e.args = {lhs, not_expr()};
            lhs = make(std::move(e));
        }
    }

    ExprPtr not_expr() {
        std::size_t pos = peek().pos;
        if (keyword("NOT")) {
            Expr e;
            e.kind = Expr::Kind::Not;
            e.pos = pos;
            e.args = {not_expr()};
            return make(std::move(e));
        }
        return comparison();
    }

    ExprPtr comparison() {
        ExprPtr lhs = additive();
        std::size_t pos = peek().pos;
        if (keyword("IS")) {
            Expr e;
            e.kind = Expr::Kind::Is;
            e.pos = pos;
            e.negated = keyword("NOT");
            if (keyword("NULL")) {
                e.is_what = Expr::IsWhat::Null;
            } else if (dialect_ == Dialect::SqlPlusPlus && keyword("UNKNOWN")) {
                e.is_what = Expr::IsWhat::Unknown;
            } else if (dialect_ == Dialect::SqlPlusPlus && keyword("MISSING")) {
                e.is_what = Expr::IsWhat::Missing;
            } else {
                throw fail("expected NULL after IS");
            }
            e.args = {lhs};
            return make(std::move(e));
        }
        if (peek().kind != Tok::Symbol) return lhs;
        const std::string& s = peek().text;
        CompareOp op;
        if (s == "=" || s == "==") {
            op = CompareOp::Eq;
        } else if (s == "!=" || s == "<>") {
            op = CompareOp::Ne;
        } else if (s == "<") {
            op = CompareOp::Lt;
        } else if (s == "<=") {
            op = CompareOp::Le;
        } else if (s == ">") {
            op = CompareOp::Gt;
        } else if (s == ">=") {
            op = CompareOp::Ge;
        } else {
            return lhs;
        }
        ++at_;
        Expr e;
        e.kind = Expr::Kind::Compare;
        e.pos = pos;
        e.compare = op;
        e.args = {lhs, additive()};
        return make(std::move(e));
    }

    ExprPtr additive() {
        ExprPtr lhs = multiplicative();
        while (peek().kind == Tok::Symbol && (peek().text == "+" || peek().text == "-")) {
            Expr e;
            e.kind = Expr::Kind::Arith;
            e.pos = peek().pos;
            e.arith = next().text[0];
            e.args = {lhs, multiplicative()};
            lhs = make(std::move(e));
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        ExprPtr lhs = unary();
        while (peek().kind == Tok::Symbol && (peek().text == "*" || peek().text == "/" || peek().text == "%")) {
            Expr e;
            e.kind = Expr::Kind::Arith;
            e.pos = peek().pos;
            e.arith = next().text[0];
            e.args = {lhs, unary()};
            lhs = make(std::move(e));
        }
        return lhs;
    }

    ExprPtr unary() {
        if (peek().kind == Tok::Symbol && peek().text == "-") {
            Expr e;
            e.kind = Expr::Kind::Negate;
            e.pos = next().pos;
            e.args = {unary()};
            return make(std::move(e));
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = peek();
        Expr e;
        e.pos = t.pos;
        switch (t.kind) {
            case Tok::Int: {
                std::int64_t n = 0;
                auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
                if (ec != std::errc()) throw fail("integer literal out of range");
                e.literal = Value::integer(n);
                ++at_;
                return make(std::move(e));
            }
            case Tok::Float:
                e.literal = Value::real(std::stod(t.text));
                ++at_;
                return make(std::move(e));
            case Tok::String:
                e.literal = Value::string(t.text);
                ++at_;
                return make(std::move(e));
            case Tok::Symbol:
                if (t.text == "(") {
                    ++at_;
                    ExprPtr inner = expr();
                    expect_symbol(")");
                    return inner;
                }
                throw fail("expected expression");
            case Tok::End:
                throw fail("expected expression");
            case Tok::Ident:
            case Tok::QuotedIdent:
                break;
        }
        if (t.kind == Tok::Ident) {
            std::string kw = upper(t.text);
            if (kw == "NULL") {
                ++at_;
                e.literal = Value::null();
                return make(std::move(e));
            }
            if (kw == "TRUE" || kw == "FALSE") {
                ++at_;
                e.literal = Value::boolean(kw == "TRUE");
                return make(std::move(e));
            }
            if (kw == "MISSING" && dialect_ == Dialect::SqlPlusPlus) {
                ++at_;
                e.literal = Value::missing();
                return make(std::move(e));
            }
            if (kw == "CAST") {
                ++at_;
                expect_symbol("(");
                e.kind = Expr::Kind::Cast;
                e.args = {expr()};
                expect_keyword("AS");
                if (peek().kind != Tok::Ident) throw fail("expected type name");
                e.name = upper(next().text);
                static const std::unordered_set<std::string> types = {
                    "INTEGER", "INT", "BIGINT", "TEXT", "VARCHAR", "STRING", "DOUBLE", "FLOAT", "REAL", "BOOLEAN"};
                if (!types.count(e.name)) throw error_at(text_, e.pos, "unsupported CAST target '" + e.name + "'");
                expect_symbol(")");
                return make(std::move(e));
            }
            if (peek(1).kind == Tok::Symbol && peek(1).text == "(") {
                if (!aggregates().count(kw) && !scalars().count(kw)) {
                    throw error_at(text_, t.pos, "unknown function '" + t.text + "'");
                }
                at_ += 2;
                if (kw == "COUNT" && symbol("*")) {
                    expect_symbol(")");
                    e.kind = Expr::Kind::CountStar;
                    e.name = kw;
                    return make(std::move(e));
                }
                e.kind = Expr::Kind::Call;
                e.name = kw;
                e.args = {expr()};
                expect_symbol(")");
                return make(std::move(e));
            }
            if (reserved().count(kw)) throw fail("unexpected keyword");
        }
        e.kind = Expr::Kind::Column;
        e.name = next().text;
        if (symbol(".")) {
            e.qualifier = std::move(e.name);
            e.name = identifier("column name");
        }
        return make(std::move(e));
    }

    std::string_view text_;
    Dialect dialect_;
    std::vector<Token> toks_;
    std::size_t at_ = 0;
};

}  // namespace

Statement parse(std::string_view text, Dialect dialect) { return Parser(text, dialect).statement(); }

}  // namespace frameql::sql
