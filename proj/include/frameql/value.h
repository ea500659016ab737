#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace frameql {

struct Missing {
    friend bool operator==(Missing, Missing) { return true; }
};
struct Null {
    friend bool operator==(Null, Null) { return true; }
};

/// A dynamically typed cell. MISSING (absent attribute) and NULL (explicit
/// null) are distinct variants.
class Value {
public:
    enum class Kind { Missing, Null, Bool, Int, Float, String };

    Value() : data_(Missing{}) {}

    static Value missing() { return Value(Missing{}); }
    static Value null() { return Value(Null{}); }
    static Value boolean(bool b) { return Value(b); }
    static Value integer(std::int64_t i) { return Value(i); }
    static Value real(double d) { return Value(d); }
    static Value string(std::string s) { return Value(std::move(s)); }

    Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
    bool is_missing() const noexcept { return kind() == Kind::Missing; }
    bool is_null() const noexcept { return kind() == Kind::Null; }
    /// NULL or MISSING.
    bool is_unknown() const noexcept { return is_missing() || is_null(); }
    bool is_bool() const noexcept { return kind() == Kind::Bool; }
    bool is_int() const noexcept { return kind() == Kind::Int; }
    bool is_float() const noexcept { return kind() == Kind::Float; }
    bool is_number() const noexcept { return is_int() || is_float(); }
    bool is_string() const noexcept { return kind() == Kind::String; }

    bool as_bool() const { return std::get<bool>(data_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
    double as_float() const { return std::get<double>(data_); }
    const std::string& as_string() const { return std::get<std::string>(data_); }
    /// Numeric value widened to double; INT or FLOAT only.
    double as_number() const;

    /// Structural equality: same variant and same payload. INT 1 != FLOAT 1.0.
    friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

    /// Debug rendering: MISSING, NULL, true, 42, 1.5, "text".
    std::string to_string() const;

private:
    using Storage = std::variant<Missing, Null, bool, std::int64_t, double, std::string>;

    explicit Value(Missing m) : data_(m) {}
    explicit Value(Null n) : data_(n) {}
    explicit Value(bool b) : data_(b) {}
    explicit Value(std::int64_t i) : data_(i) {}
    explicit Value(double d) : data_(d) {}
    explicit Value(std::string s) : data_(std::move(s)) {}

    Storage data_;
};

std::string_view kind_name(Value::Kind kind);

enum class Ordering { Less, Equal, Greater };

/// Total order used by the aggregation-pipeline dialect:
/// MISSING < NULL < numbers (INT and FLOAT compared numerically) < STR < BOOL.
Ordering mongo_total_order(const Value& a, const Value& b);

enum class Tristate { False, True, Unknown };

enum class CompareOp { Eq, Ne, Gt, Lt, Ge, Le };

/// SQL three-valued comparison. UNKNOWN iff either side is NULL or MISSING;
/// numbers compare numerically; other cross-type comparisons are FALSE.
Tristate sql_tristate_compare(const Value& a, CompareOp op, const Value& b);

Tristate tri_and(Tristate a, Tristate b);
Tristate tri_or(Tristate a, Tristate b);
Tristate tri_not(Tristate a);

/// Ordered attribute list; reading an absent attribute yields MISSING.
class Record {
public:
    using Field = std::pair<std::string, Value>;

    Record() = default;
    Record(std::initializer_list<Field> fields);

    /// MISSING when absent.
    const Value& get(std::string_view name) const;
    bool has(std::string_view name) const;
    /// Replaces an existing attribute in place, else appends.
    void set(std::string name, Value value);
    void erase(std::string_view name);

    const std::vector<Field>& fields() const noexcept { return fields_; }
    std::size_t size() const noexcept { return fields_.size(); }
    bool empty() const noexcept { return fields_.empty(); }

    /// Order-sensitive over present attributes; an explicit MISSING equals absence.
    friend bool operator==(const Record& a, const Record& b);

    std::string to_string() const;

private:
    std::vector<Field> fields_;
};

struct Table {
    std::vector<Record> rows;
    /// When set, projected rows expose exactly these columns in this order.
    std::optional<std::vector<std::string>> columns;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }

    friend bool operator==(const Table& a, const Table& b) { return a.rows == b.rows; }
};

}  // namespace frameql
