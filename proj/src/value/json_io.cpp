#include "frameql/json_io.h"

#include <fstream>
#include <sstream>

#include "frameql/error.h"

namespace frameql::json_io {

Value to_value(const Json& j) {
    switch (j.type()) {
    case Json::value_t::null: return Value::null();
    case Json::value_t::boolean: return Value::boolean(j.get<bool>());
    case Json::value_t::number_integer: return Value::integer(j.get<std::int64_t>());
    case Json::value_t::number_unsigned: {
        const auto u = j.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX)) {
            return Value::real(static_cast<double>(u));
        }
        return Value::integer(static_cast<std::int64_t>(u));
    }
    case Json::value_t::number_float: return Value::real(j.get<double>());
    case Json::value_t::string: return Value::string(j.get<std::string>());
    default: throw EvalError("nested JSON value not supported: " + j.dump());
    }
}

Json to_json(const Value& v) {
    switch (v.kind()) {
    case Value::Kind::Missing:
    case Value::Kind::Null: return nullptr;
    case Value::Kind::Bool: return v.as_bool();
    case Value::Kind::Int: return v.as_int();
    case Value::Kind::Float: return v.as_float();
    case Value::Kind::String: return v.as_string();
    }
    return nullptr;
}

Record to_record(const Json& object) {
    if (!object.is_object()) {
        throw EvalError("expected a JSON object, got " + object.dump());
    }
    Record r;
    for (const auto& [key, value] : object.items()) {
        r.set(key, to_value(value));
    }
    return r;
}

Json to_json(const Record& record) {
    Json out = Json::object();
    for (const auto& [name, value] : record.fields()) {
        if (!value.is_missing()) {
            out[name] = to_json(value);
        }
    }
    return out;
}

Table read(std::string_view text) {
    Table table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            if (end == text.size()) break;
            continue;
        }
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
        }
        if (!j.is_object()) {
            throw ParseError("expected a JSON object per line", line_no);
        }
        try {
            table.rows.push_back(to_record(j));
        } catch (const EvalError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (end == text.size()) break;
    }
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return read(buf.str());
}

void write(const Table& table, std::ostream& out) {
    for (const auto& row : table.rows) {
        out << to_json(row).dump() << '\n';
    }
}

std::string write(const Table& table) {
    std::ostringstream out;
    write(table, out);
    return out.str();
}

void write_file(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    write(table, out);
}

}  // namespace frameql::json_io
