#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "frameql/bench.h"
#include "frameql/error.h"
#include "frameql/random.h"

namespace frameql::bench {

namespace {

bool int_equals(const Value& v, std::int64_t x) { return v.is_int() && v.as_int() == x; }

std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

bool values_match(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) {
        if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
        const double x = a.as_number();
        const double y = b.as_number();
        if (x == y) return true;
        return std::fabs(x - y) <= 1e-9 * std::max(std::fabs(x), std::fabs(y));
    }
    if (a.is_unknown() && b.is_unknown()) return true;
    return a == b;
}

bool rows_match(const std::vector<Value>& a, const std::vector<Value>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!values_match(a[i], b[i])) return false;
    return true;
}

// Values of `columns` in `r`, or its single present field when columns is empty.
std::optional<std::vector<Value>> project_row(const Record& r, const std::vector<std::string>& columns) {
    if (!columns.empty()) {
        std::vector<Value> out;
        for (const auto& c : columns) out.push_back(r.get(c));
        return out;
    }
    std::vector<Value> out;
    for (const auto& [name, v] : r.fields())
        if (!v.is_missing()) out.push_back(v);
    if (out.size() != 1) return std::nullopt;
    return out;
}

std::string show(const std::vector<Value>& row) {
    std::string out = "(";
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? ", " : "") + row[i].to_string();
    return out + ")";
}

bool value_less(const Value& a, const Value& b) { return mongo_total_order(a, b) == Ordering::Less; }

}  // namespace

OracleResult oracle_eval(int id, const Table& data, const Params& p) {
    OracleResult out;
    const auto& rows = data.rows;
    auto count_if = [&](auto pred) {
        out.shape = OracleResult::Shape::Count;
        out.count = std::count_if(rows.begin(), rows.end(), pred);
        return out;
    };
    auto grouped = [&](const std::string& key, auto init, auto step) {
        out.shape = OracleResult::Shape::Groups;
        out.key = key;
        std::vector<std::pair<Value, Value>> groups;
        for (const Record& r : rows) {
            const Value& k = r.get(key);
            if (k.is_unknown()) continue;
            auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == k; });
            if (it == groups.end()) {
                groups.emplace_back(k, init());
                it = groups.end() - 1;
            }
            it->second = step(it->second, r);
        }
        for (auto& [k, v] : groups) out.rows.push_back({k, v});
        return out;
    };
    switch (id) {
        case 1: return count_if([](const Record&) { return true; });
        case 2:
        case 10: {
            out.shape = OracleResult::Shape::Head;
            if (id == 2) {
                out.columns = {"two", "four"};
            } else if (!rows.empty()) {
                for (const auto& [name, v] : rows.front().fields()) out.columns.push_back(name);
            }
            for (const Record& r : rows) {
                if (id == 10 && !int_equals(r.get("ten"), p.x)) continue;
                std::vector<Value> row;
                for (const auto& c : out.columns) row.push_back(r.get(c));
                out.rows.push_back(std::move(row));
            }
            out.expected_rows = std::min<std::size_t>(5, out.rows.size());
            return out;
        }
        case 3:
            return count_if([&](const Record& r) {
                return int_equals(r.get("ten"), p.x) && int_equals(r.get("twentyPercent"), p.y3) &&
                       int_equals(r.get("two"), p.z);
            });
        case 4:
            return grouped(
                "oddOnePercent", [] { return Value::integer(0); },
                [](const Value& acc, const Record& r) {
                    return Value::integer(acc.as_int() + (r.get("oddOnePercent").is_unknown() ? 0 : 1));
                });
        case 5: {
            out.shape = OracleResult::Shape::Head;
            for (const Record& r : rows) {
                const Value& v = r.get("stringu1");
                out.rows.push_back({v.is_string() ? Value::string(to_upper(v.as_string())) : v});
            }
            out.expected_rows = std::min<std::size_t>(5, out.rows.size());
            return out;
        }
        case 6:
        case 7: {
            out.shape = OracleResult::Shape::Scalar;
            out.scalar = Value::null();
            for (const Record& r : rows) {
                const Value& v = r.get("unique1");
                if (v.is_unknown()) continue;
                if (out.scalar.is_null() || (id == 6 ? value_less(out.scalar, v) : value_less(v, out.scalar)))
                    out.scalar = v;
            }
            return out;
        }
        case 8:
            return grouped(
                "twenty", [] { return Value::null(); },
                [](const Value& acc, const Record& r) {
                    const Value& v = r.get("four");
                    if (v.is_unknown()) return acc;
                    return acc.is_null() || value_less(acc, v) ? v : acc;
                });
        case 9: {
            out.shape = OracleResult::Shape::Ordered;
            out.key = "unique1";
            std::vector<Value> keys;
            for (const Record& r : rows) keys.push_back(r.get("unique1"));
            std::stable_sort(keys.begin(), keys.end(), [](const Value& a, const Value& b) { return value_less(b, a); });
            for (std::size_t i = 0; i < keys.size() && i < 5; ++i) out.rows.push_back({keys[i]});
            out.expected_rows = out.rows.size();
            return out;
        }
        case 11:
            return count_if([&](const Record& r) {
                const Value& v = r.get("onePercent");
                return v.is_int() && v.as_int() >= p.x && v.as_int() <= p.y11;
            });
        case 12: {
            out.shape = OracleResult::Shape::Count;
            std::map<std::int64_t, std::int64_t> freq;
            for (const Record& r : rows) {
                const Value& v = r.get("unique1");
                if (v.is_int()) ++freq[v.as_int()];
            }
            for (const auto& [k, n] : freq) out.count += n * n;
            return out;
        }
        case 13: return count_if([](const Record& r) { return r.get("tenPercent").is_unknown(); });
        default: throw Error("no benchmark expression " + std::to_string(id));
    }
}

MatchReport diff_results(const ExprResult& engine, const OracleResult& oracle, int id) {
    using Shape = OracleResult::Shape;
    const std::string where = "expression " + std::to_string(id) + ": ";
    switch (oracle.shape) {
        case Shape::Count: {
            const auto* n = std::get_if<std::int64_t>(&engine.value);
            if (!n) return {false, where + "expected a count"};
            if (*n != oracle.count)
                return {false, where + "count " + std::to_string(*n) + " != oracle " + std::to_string(oracle.count)};
            return {true, ""};
        }
        case Shape::Scalar: {
            const auto* v = std::get_if<Value>(&engine.value);
            if (!v) return {false, where + "expected a scalar"};
            if (!values_match(*v, oracle.scalar))
                return {false, where + v->to_string() + " != oracle " + oracle.scalar.to_string()};
            return {true, ""};
        }
        default: break;
    }
    const auto* table = std::get_if<Table>(&engine.value);
    if (!table) return {false, where + "expected rows"};
    const auto& rows = table->rows;

    if (oracle.shape == Shape::Head) {
        if (rows.size() != oracle.expected_rows)
            return {false, where + std::to_string(rows.size()) + " rows, expected " +
                               std::to_string(oracle.expected_rows)};
        std::vector<bool> used(oracle.rows.size(), false);
        for (const Record& r : rows) {
            auto row = project_row(r, oracle.columns);
            if (!row) return {false, where + "row has no single value: " + r.to_string()};
            bool found = false;
            for (std::size_t i = 0; i < oracle.rows.size() && !found; ++i) {
                if (!used[i] && rows_match(*row, oracle.rows[i])) used[i] = found = true;
            }
            if (!found) return {false, where + "row " + show(*row) + " is not in the oracle result"};
        }
        return {true, ""};
    }

    if (oracle.shape == Shape::Ordered) {
        if (rows.size() != oracle.rows.size())
            return {false, where + std::to_string(rows.size()) + " rows, expected " + std::to_string(oracle.rows.size())};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Value& k = rows[i].get(oracle.key);
            if (!values_match(k, oracle.rows[i][0]))
                return {false, where + "row " + std::to_string(i) + " has " + oracle.key + "=" + k.to_string() +
                                   ", expected " + oracle.rows[i][0].to_string()};
        }
        return {true, ""};
    }

    // Groups: (key, the one other field) compared as multisets.
    std::vector<std::vector<Value>> got;
    for (const Record& r : rows) {
        std::vector<Value> others;
        for (const auto& [name, v] : r.fields())
            if (name != oracle.key && !v.is_missing()) others.push_back(v);
        if (others.size() != 1) return {false, where + "group row is not (key, value): " + r.to_string()};
        got.push_back({r.get(oracle.key), others.front()});
    }
    auto expected = oracle.rows;
    auto by_key = [](const std::vector<Value>& a, const std::vector<Value>& b) {
        if (mongo_total_order(a[0], b[0]) != Ordering::Equal) return value_less(a[0], b[0]);
        return value_less(a[1], b[1]);
    };
    std::sort(got.begin(), got.end(), by_key);
    std::sort(expected.begin(), expected.end(), by_key);
    if (got.size() != expected.size())
        return {false, where + std::to_string(got.size()) + " groups, expected " + std::to_string(expected.size())};
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (!rows_match(got[i], expected[i]))
            return {false, where + "group " + show(got[i]) + " != oracle " + show(expected[i])};
    }
    return {true, ""};
}

std::string digest(const ExprResult& result) {
    std::string canonical;
    if (const auto* n = std::get_if<std::int64_t>(&result.value)) {
        canonical = "count:" + std::to_string(*n);
    } else if (const auto* v = std::get_if<Value>(&result.value)) {
        canonical = "scalar:" + v->to_string();
    } else {
        canonical = "rows:" + json_io::write(std::get<Table>(result.value));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
    return buf;
}

}  // namespace frameql::bench
