#include "util.h"

#include <charconv>
#include <cmath>
#include <limits>

#include "frameql/error.h"

namespace frameql::exec {

std::string equality_key(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::Missing:
            return "m";
        case Value::Kind::Null:
            return "n";
        case Value::Kind::Bool:
            return v.as_bool() ? "b1" : "b0";
        case Value::Kind::Int:
            return "i" + std::to_string(v.as_int());
        case Value::Kind::Float: {
            double d = v.as_float();
            if (std::isfinite(d) && d == std::trunc(d) && std::fabs(d) < 9.0e18) {
                return "i" + std::to_string(static_cast<std::int64_t>(d));
            }
            char buf[64];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
            return "f" + std::string(buf, end);
        }
        case Value::Kind::String:
            return "s" + v.as_string();
    }
    return "?";
}

Value to_integer(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::Missing:
        case Value::Kind::Null:
            return v;
        case Value::Kind::Bool:
            return Value::integer(v.as_bool() ? 1 : 0);
        case Value::Kind::Int:
            return v;
        case Value::Kind::Float: {
            double d = v.as_float();
            if (!std::isfinite(d) || std::fabs(d) >= 9.2e18) throw EvalError("cannot convert " + v.to_string() + " to integer");
            return Value::integer(static_cast<std::int64_t>(std::trunc(d)));
        }
        case Value::Kind::String: {
            const std::string& s = v.as_string();
            std::int64_t n = 0;
            const char* first = s.data();
            if (!s.empty() && s[0] == '+') ++first;
            auto [end, ec] = std::from_chars(first, s.data() + s.size(), n);
            if (ec != std::errc() || end != s.data() + s.size()) {
                throw EvalError("cannot convert " + v.to_string() + " to integer");
            }
            return Value::integer(n);
        }
    }
    return v;
}

Value to_text(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::Missing:
        case Value::Kind::Null:
        case Value::Kind::String:
            return v;
        case Value::Kind::Bool:
            return Value::string(v.as_bool() ? "true" : "false");
        case Value::Kind::Int:
            return Value::string(std::to_string(v.as_int()));
        case Value::Kind::Float: {
            char buf[64];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.as_float());
            return Value::string(std::string(buf, end));
        }
    }
    return v;
}

Value arithmetic(char op, const Value& a, const Value& b, bool int_division_is_real) {
    if (a.is_missing() || b.is_missing()) return Value::missing();
    if (a.is_null() || b.is_null()) return Value::null();
    if (!a.is_number() || !b.is_number()) {
        throw EvalError(std::string("operator '") + op + "' expects numbers, got " + a.to_string() + " and " +
                        b.to_string());
    }
    bool ints = a.is_int() && b.is_int();
    if ((op == '/' || op == '%') && b.as_number() == 0) throw EvalError("division by zero");
    if (ints) {
        std::int64_t x = a.as_int(), y = b.as_int(), r = 0;
        switch (op) {
            case '+':
                if (__builtin_add_overflow(x, y, &r)) throw EvalError("integer overflow");
                return Value::integer(r);
            case '-':
                if (__builtin_sub_overflow(x, y, &r)) throw EvalError("integer overflow");
                return Value::integer(r);
            case '*':
                if (__builtin_mul_overflow(x, y, &r)) throw EvalError("integer overflow");
                return Value::integer(r);
            case '%':
                if (y == -1) return Value::integer(0);
                return Value::integer(x % y);
            case '/':
                if (int_division_is_real) return Value::real(static_cast<double>(x) / static_cast<double>(y));
                if (x == std::numeric_limits<std::int64_t>::min() && y == -1) throw EvalError("integer overflow");
                return Value::integer(x / y);
        }
    }
    double x = a.as_number(), y = b.as_number();
    switch (op) {
        case '+':
            return Value::real(x + y);
        case '-':
            return Value::real(x - y);
        case '*':
            return Value::real(x * y);
        case '/':
            return Value::real(x / y);
        case '%':
            return Value::real(std::fmod(x, y));
    }
    throw EvalError(std::string("unknown operator '") + op + "'");
}

Value accumulate(Accumulator acc, const std::vector<Value>& values, bool empty_sum_is_null) {
    if (acc == Accumulator::Min || acc == Accumulator::Max) {
        if (values.empty()) return Value::null();
        const Value* best = &values.front();
        for (const auto& v : values) {
            Ordering o = mongo_total_order(v, *best);
            if ((acc == Accumulator::Min && o == Ordering::Less) || (acc == Accumulator::Max && o == Ordering::Greater)) {
                best = &v;
            }
        }
        return *best;
    }
    for (const auto& v : values) {
        if (!v.is_number()) throw EvalError("numeric aggregate over non-numeric value " + v.to_string());
    }
    if (values.empty()) {
        if (acc == Accumulator::Sum && !empty_sum_is_null) return Value::integer(0);
        return Value::null();
    }
    if (acc == Accumulator::Sum) {
        bool all_int = true;
        std::int64_t isum = 0;
        for (const auto& v : values) {
            if (!v.is_int() || __builtin_add_overflow(isum, v.as_int(), &isum)) {
                all_int = false;
                break;
            }
        }
        double fsum = 0;
        if (!all_int) {
            for (const auto& v : values) fsum += v.as_number();
        }
        return all_int ? Value::integer(isum) : Value::real(fsum);
    }
    double mean = 0;
    for (const auto& v : values) mean += v.as_number();
    mean /= static_cast<double>(values.size());
    if (acc == Accumulator::Avg) return Value::real(mean);
    double ss = 0;
    for (const auto& v : values) ss += (v.as_number() - mean) * (v.as_number() - mean);
    return Value::real(std::sqrt(ss / static_cast<double>(values.size())));
}

}  // namespace frameql::exec
