#include "frameql/datagen.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "frameql/error.h"
#include "frameql/json_io.h"
#include "frameql/random.h"

namespace frameql::datagen {

const std::vector<std::string>& wisconsin_attributes() {
    static const std::vector<std::string> attrs = {
        "unique1",    "unique2",     "two",        "four",         "ten",           "twenty",
        "onePercent", "tenPercent",  "twentyPercent", "fiftyPercent", "unique3",    "evenOnePercent",
        "oddOnePercent", "stringu1", "stringu2",   "string4"};
    return attrs;
}

void GeneratorSpec::validate() const {
    if (max < 1) throw Error("MAX must be at least 1");
    if (!(missing_rate >= 0.0 && missing_rate <= 1.0)) throw Error("missing rate must be within [0, 1]");
}

std::string derive_string(std::int64_t u, StringRole role, std::int64_t cycle_index) {
    if (role == StringRole::String4) {
        static const char cycle[] = {'A', 'H', 'O', 'V'};
        std::int64_t k = ((cycle_index % 4) + 4) % 4;
        return std::string(1, cycle[k]) + std::string(51, 'x');
    }
    constexpr std::int64_t kLimit = 8031810176;  // 26^7
    if (u < 0 || u >= kLimit) throw Error("value " + std::to_string(u) + " does not fit in 7 base-26 digits");
    std::string head(7, 'A');
    for (int i = 6; i >= 0 && u > 0; --i) {
        head[i] = static_cast<char>('A' + u % 26);
        u /= 26;
    }
    return head + std::string(45, 'x');
}

namespace {

std::vector<std::int64_t> permutation(std::int64_t max, std::uint64_t seed) {
    std::vector<std::int64_t> p(static_cast<std::size_t>(max));
    std::iota(p.begin(), p.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = p.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

Record make_row(std::int64_t unique1, std::int64_t unique2) {
    const std::int64_t one = unique1 % 100;
    Record r;
    r.set("unique1", Value::integer(unique1));
    r.set("unique2", Value::integer(unique2));
    r.set("two", Value::integer(unique1 % 2));
    r.set("four", Value::integer(unique1 % 4));
    r.set("ten", Value::integer(unique1 % 10));
    r.set("twenty", Value::integer(unique1 % 20));
    r.set("onePercent", Value::integer(one));
    r.set("tenPercent", Value::integer(unique1 % 10));
    r.set("twentyPercent", Value::integer(unique1 % 5));
    r.set("fiftyPercent", Value::integer(unique1 % 2));
    r.set("unique3", Value::integer(unique1));
    r.set("evenOnePercent", Value::integer(one * 2));
    r.set("oddOnePercent", Value::integer(one * 2 + 1));
    r.set("stringu1", Value::string(derive_string(unique1, StringRole::StringU)));
    r.set("stringu2", Value::string(derive_string(unique2, StringRole::StringU)));
    r.set("string4", Value::string(derive_string(0, StringRole::String4, unique2)));
    return r;
}

// Row indices that lose `attr`.
std::vector<std::size_t> missing_rows(std::size_t rows, const std::string& attr, double rate, std::uint64_t seed) {
    auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(rows)));
    k = std::min(k, rows);
    std::vector<std::size_t> idx(rows);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed ^ fnv1a(attr));
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, rows - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void check_attrs(const std::vector<std::string>& attrs) {
    const auto& known = wisconsin_attributes();
    for (const auto& a : attrs) {
        if (std::find(known.begin(), known.end(), a) == known.end()) throw Error("unknown attribute '" + a + "'");
    }
}

}  // namespace

Table generate_complete(std::int64_t max, std::uint64_t seed) {
    if (max < 1) throw Error("MAX must be at least 1");
    auto perm = permutation(max, seed);
    Table t;
    t.rows.reserve(perm.size());
    for (std::int64_t i = 0; i < max; ++i) t.rows.push_back(make_row(perm[static_cast<std::size_t>(i)], i));
    return t;
}

void inject_missing(Table& table, const std::vector<std::string>& attrs, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw Error("missing rate must be within [0, 1]");
    check_attrs(attrs);
    for (const auto& a : attrs) {
        for (std::size_t i : missing_rows(table.rows.size(), a, rate, seed)) table.rows[i].erase(a);
    }
}

Table generate(const GeneratorSpec& spec) {
    spec.validate();
    check_attrs(spec.missing_attrs);
    Table t = generate_complete(spec.max, spec.seed);
    inject_missing(t, spec.missing_attrs, spec.missing_rate, spec.seed);
    return t;
}

void write_jsonl(const GeneratorSpec& spec, std::ostream& out) {
    spec.validate();
    check_attrs(spec.missing_attrs);
    auto perm = permutation(spec.max, spec.seed);
    const auto rows = static_cast<std::size_t>(spec.max);
    std::vector<std::vector<std::size_t>> holes;
    for (const auto& a : spec.missing_attrs) holes.push_back(missing_rows(rows, a, spec.missing_rate, spec.seed));
    std::vector<std::size_t> cursor(holes.size(), 0);
    for (std::size_t i = 0; i < rows; ++i) {
        Record r = make_row(perm[i], static_cast<std::int64_t>(i));
        for (std::size_t h = 0; h < holes.size(); ++h) {
            if (cursor[h] < holes[h].size() && holes[h][cursor[h]] == i) {
                r.erase(spec.missing_attrs[h]);
                ++cursor[h];
            }
        }
        out << json_io::to_json(r).dump() << '\n';
    }
}

}  // namespace frameql::datagen
