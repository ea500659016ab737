#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "frameql/connector.h"
#include "frameql/pack_catalog.h"
#include "frameql/query_text.h"
#include "frameql/value.h"

namespace frameql {

/// A constant operand. `symbol` renders its text verbatim (used for the
/// placeholder parameters of the benchmark queries).
struct Literal {
    Value value;
    std::optional<std::string> raw;

    Literal(int v) : value(Value::integer(v)) {}
    Literal(long v) : value(Value::integer(v)) {}
    Literal(long long v) : value(Value::integer(v)) {}
    Literal(double v) : value(Value::real(v)) {}
    Literal(bool v) : value(Value::boolean(v)) {}
    Literal(const char* v) : value(Value::string(v)) {}
    Literal(std::string v) : value(Value::string(std::move(v))) {}
    explicit Literal(Value v) : value(std::move(v)) {}

    static Literal null() { return Literal(Value::null()); }
    static Literal symbol(std::string text);
};

enum class FrameKind { Scan, Projected, Expr, Filtered, Grouped, Sorted, Limited, Joined, Aggregated };
enum class Arity { Boolean, Numeric, String, Any };
enum class ArithOp { Add, Sub, Mul, Div, Mod };
enum class Conversion { ToInt, ToStr };

std::string_view frame_kind_name(FrameKind kind);

class Frame;
using Operand = std::variant<Literal, Frame>;

/// Immutable lazy dataframe. Transformations compose a new query from the
/// parent's query and never touch the connector; actions render and execute.
class Frame {
public:
    static Frame scan(std::string ns, std::string collection, PackPtr pack, ConnectorPtr connector);

    FrameKind kind() const;
    const QueryText& query() const;
    const std::string& ns() const;
    const std::string& collection() const;
    std::uint64_t root_id() const;
    const std::vector<std::string>& columns() const;
    /// Bare predicate or value expression; EXPR frames only.
    const std::string& snippet() const;
    Arity arity() const;
    const LanguagePack& pack() const;
    const ConnectorPtr& connector() const;

    // Transformations.
    Frame project(std::vector<std::string> columns) const;
    Frame operator[](const std::string& column) const { return project({column}); }
    Frame operator[](const char* column) const { return project({column}); }
    Frame operator[](std::vector<std::string> columns) const { return project(std::move(columns)); }
    /// Boolean mask selection.
    Frame operator[](const Frame& mask) const { return filter(mask); }

    Frame compare(CompareOp op, const Operand& rhs) const;
    Frame arith(ArithOp op, const Operand& rhs) const;
    Frame logical_and(const Frame& rhs) const;
    Frame logical_or(const Frame& rhs) const;
    Frame logical_not() const;
    Frame isna() const;
    Frame notna() const;
    Frame astype(Conversion to) const;
    Frame upper() const;

    Frame filter(const Frame& mask) const;
    Frame groupby_agg(const std::string& key, const std::string& func, const std::string& col) const;
    Frame sort(const std::string& col, bool descending) const;
    Frame join(const Frame& right, const std::string& left_on, const std::string& right_on,
               const std::string& how = "inner") const;
    Frame describe(const std::vector<std::string>& columns) const;
    /// Executes one distinct-values query, then returns a lazy one-hot projection.
    Frame get_dummies(const std::string& col, std::size_t max_distinct = 64) const;

    // Actions.
    Table head(std::size_t n) const;
    std::int64_t count() const;
    Value agg_value(const std::string& func, const std::string& col) const;
    Table collect() const;
    void persist(const std::string& target) const;

    // Queries the actions would run, without executing them.
    QueryText head_query(std::size_t n) const;
    QueryText count_query() const;
    QueryText agg_value_query(const std::string& func, const std::string& col) const;
    QueryText collect_query() const;
    QueryText persist_query(const std::string& target) const;

    struct State;

private:
    explicit Frame(std::shared_ptr<const State> state) : state_(std::move(state)) {}

    std::shared_ptr<const State> state_;
};

Frame operator==(const Frame& a, const Operand& b);
Frame operator!=(const Frame& a, const Operand& b);
Frame operator>(const Frame& a, const Operand& b);
Frame operator<(const Frame& a, const Operand& b);
Frame operator>=(const Frame& a, const Operand& b);
Frame operator<=(const Frame& a, const Operand& b);
Frame operator+(const Frame& a, const Operand& b);
Frame operator-(const Frame& a, const Operand& b);
Frame operator*(const Frame& a, const Operand& b);
Frame operator/(const Frame& a, const Operand& b);
Frame operator%(const Frame& a, const Operand& b);
Frame operator&(const Frame& a, const Frame& b);
Frame operator|(const Frame& a, const Frame& b);
Frame operator~(const Frame& a);

/// Text a literal renders to under the pack's [LITERALS] rules.
std::string render_literal(const Literal& literal, const LanguagePack& pack);

}  // namespace frameql
