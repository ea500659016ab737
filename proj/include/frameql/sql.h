#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frameql/catalog.h"
#include "frameql/value.h"

namespace frameql::sql {

/// `Sql`: double quotes delimit identifiers. `SqlPlusPlus`: double and single
/// quotes both delimit strings, backticks delimit identifiers, and
/// SELECT VALUE / IS UNKNOWN / IS MISSING are available.
enum class Dialect { Sql, SqlPlusPlus };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Column, Literal, CountStar, Compare, And, Or, Not, Arith, Negate, Call, Is, Cast };
    enum class IsWhat { Null, Unknown, Missing };

    Kind kind = Kind::Literal;
    std::size_t pos = 0;
    std::string qualifier;  // Column: optional "alias."
    std::string name;       // Column name; Call function (upper case); Cast target type (upper case)
    Value literal;
    CompareOp compare = CompareOp::Eq;
    char arith = '+';
    IsWhat is_what = IsWhat::Null;
    bool negated = false;  // IS NOT ...
    std::vector<ExprPtr> args;
};

struct Select;

struct Source {
    enum class Kind { Table, Subquery, Join };
    Kind kind = Kind::Table;
    std::string ns;
    std::string name;
    std::shared_ptr<const Select> subquery;
    std::string alias;
    std::shared_ptr<const Source> left;
    std::shared_ptr<const Source> right;
    ExprPtr on;
};

struct SelectItem {
    enum class Kind { Expr, Star, QualifiedStar };
    Kind kind = Kind::Expr;
    ExprPtr expr;
    std::string alias;
    std::string qualifier;
};

struct OrderKey {
    ExprPtr expr;
    bool descending = false;
};

struct Select {
    bool value_mode = false;
    std::vector<SelectItem> items;
    Source from;
    ExprPtr where;
    std::vector<ExprPtr> group_by;
    std::vector<OrderKey> order_by;
    std::optional<std::int64_t> limit;
};

/// A full statement: a query, or a query whose result is stored.
struct Statement {
    enum class Kind { Query, CreateTableAs, InsertInto };
    Kind kind = Kind::Query;
    Dialect dialect = Dialect::Sql;
    std::shared_ptr<const Select> select;
    std::string target_ns;
    std::string target_name;
};

/// Throws ParseError with the byte offset of the offending token.
Statement parse(std::string_view text, Dialect dialect);

/// Evaluates a statement. Writes (CREATE TABLE AS, INSERT INTO) return an
/// empty table.
Table eval(const Statement& statement, Catalog& catalog, const WriteOptions& options = {});
Table eval_select(const Select& select, const Catalog& catalog, Dialect dialect);

}  // namespace frameql::sql
