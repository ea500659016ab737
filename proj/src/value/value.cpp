#include "frameql/value.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace frameql {

namespace {

// Type brackets of the pipeline total order.
int bracket(const Value& v) {
    switch (v.kind()) {
    case Value::Kind::Missing: return 0;
    case Value::Kind::Null: return 1;
    case Value::Kind::Int:
    case Value::Kind::Float: return 2;
    case Value::Kind::String: return 3;
    case Value::Kind::Bool: return 4;
    }
    return 5;
}

template <typename T>
Ordering cmp(const T& a, const T& b) {
    if (a < b) return Ordering::Less;
    if (b < a) return Ordering::Greater;
    return Ordering::Equal;
}

// Exact comparison between numbers of either representation. long double
// carries a 64-bit mantissa on the targets we build for, so int64 is exact.
// NaN sorts below every other number.
Ordering compare_numbers(const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) {
        return cmp(a.as_int(), b.as_int());
    }
    const long double x = a.is_int() ? static_cast<long double>(a.as_int()) : a.as_float();
    const long double y = b.is_int() ? static_cast<long double>(b.as_int()) : b.as_float();
    const bool xnan = std::isnan(x);
    const bool ynan = std::isnan(y);
    if (xnan || ynan) {
        if (xnan && ynan) return Ordering::Equal;
        return xnan ? Ordering::Less : Ordering::Greater;
    }
    return cmp(x, y);
}

Tristate from_bool(bool b) { return b ? Tristate::True : Tristate::False; }

}  // namespace

double Value::as_number() const {
    if (is_int()) return static_cast<double>(as_int());
    if (is_float()) return as_float();
    throw std::logic_error("as_number on non-numeric value " + to_string());
}

std::string Value::to_string() const {
    switch (kind()) {
    case Kind::Missing: return "MISSING";
    case Kind::Null: return "NULL";
    case Kind::Bool: return as_bool() ? "true" : "false";
    case Kind::Int: return std::to_string(as_int());
    case Kind::Float: {
        std::ostringstream os;
        os.precision(17);
        os << as_float();
        return os.str();
    }
    case Kind::String: return "\"" + as_string() + "\"";
    }
    return "?";
}

std::string_view kind_name(Value::Kind kind) {
    switch (kind) {
    case Value::Kind::Missing: return "MISSING";
    case Value::Kind::Null: return "NULL";
    case Value::Kind::Bool: return "BOOL";
    case Value::Kind::Int: return "INT";
    case Value::Kind::Float: return "FLOAT";
    case Value::Kind::String: return "STR";
    }
    return "?";
}

Ordering mongo_total_order(const Value& a, const Value& b) {
    const int ba = bracket(a);
    const int bb = bracket(b);
    if (ba != bb) {
        return ba < bb ? Ordering::Less : Ordering::Greater;
    }
    switch (a.kind()) {
    case Value::Kind::Missing:
    case Value::Kind::Null: return Ordering::Equal;
    case Value::Kind::Int:
    case Value::Kind::Float: return compare_numbers(a, b);
    case Value::Kind::String: return cmp(a.as_string(), b.as_string());
    case Value::Kind::Bool: return cmp(a.as_bool(), b.as_bool());
    }
    return Ordering::Equal;
}

Tristate sql_tristate_compare(const Value& a, CompareOp op, const Value& b) {
    if (a.is_unknown() || b.is_unknown()) {
        return Tristate::Unknown;
    }
    Ordering o;
    if (a.is_number() && b.is_number()) {
        o = compare_numbers(a, b);
    } else if (a.kind() != b.kind()) {
        return Tristate::False;
    } else if (a.is_string()) {
        o = cmp(a.as_string(), b.as_string());
    } else {
        o = cmp(a.as_bool(), b.as_bool());
    }
    switch (op) {
    case CompareOp::Eq: return from_bool(o == Ordering::Equal);
    case CompareOp::Ne: return from_bool(o != Ordering::Equal);
    case CompareOp::Gt: return from_bool(o == Ordering::Greater);
    case CompareOp::Lt: return from_bool(o == Ordering::Less);
    case CompareOp::Ge: return from_bool(o != Ordering::Less);
    case CompareOp::Le: return from_bool(o != Ordering::Greater);
    }
    return Tristate::Unknown;
}

Tristate tri_and(Tristate a, Tristate b) {
    if (a == Tristate::False || b == Tristate::False) return Tristate::False;
    if (a == Tristate::True && b == Tristate::True) return Tristate::True;
    return Tristate::Unknown;
}

Tristate tri_or(Tristate a, Tristate b) {
    if (a == Tristate::True || b == Tristate::True) return Tristate::True;
    if (a == Tristate::False && b == Tristate::False) return Tristate::False;
    return Tristate::Unknown;
}

Tristate tri_not(Tristate a) {
    switch (a) {
    case Tristate::True: return Tristate::False;
    case Tristate::False: return Tristate::True;
    case Tristate::Unknown: return Tristate::Unknown;
    }
    return Tristate::Unknown;
}

Record::Record(std::initializer_list<Field> fields) {
    for (const auto& [name, value] : fields) {
        set(name, value);
    }
}

const Value& Record::get(std::string_view name) const {
    static const Value kMissing = Value::missing();
    for (const auto& f : fields_) {
        if (f.first == name) return f.second;
    }
    return kMissing;
}

bool Record::has(std::string_view name) const {
    for (const auto& f : fields_) {
        if (f.first == name) return !f.second.is_missing();
    }
    return false;
}

void Record::set(std::string name, Value value) {
    for (auto& f : fields_) {
        if (f.first == name) {
            f.second = std::move(value);
            return;
        }
    }
    fields_.emplace_back(std::move(name), std::move(value));
}

void Record::erase(std::string_view name) {
    for (auto it = fields_.begin(); it != fields_.end(); ++it) {
        if (it->first == name) {
            fields_.erase(it);
            return;
        }
    }
}

bool operator==(const Record& a, const Record& b) {
    auto ia = a.fields_.begin();
    auto ib = b.fields_.begin();
    auto skip = [](auto& it, auto end) {
        while (it != end && it->second.is_missing()) ++it;
    };
    for (;;) {
        skip(ia, a.fields_.end());
        skip(ib, b.fields_.end());
        if (ia == a.fields_.end() || ib == b.fields_.end()) {
            return ia == a.fields_.end() && ib == b.fields_.end();
        }
        if (ia->first != ib->first || !(ia->second == ib->second)) {
            return false;
        }
        ++ia;
        ++ib;
    }
}

std::string Record::to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, value] : fields_) {
        if (!first) out += ", ";
        first = false;
        out += name + ": " + value.to_string();
    }
    return out + "}";
}

}  // namespace frameql
