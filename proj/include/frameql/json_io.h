#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "frameql/value.h"

namespace frameql::json_io {

using Json = nlohmann::ordered_json;

/// One JSON object per line; blank lines are skipped. Absent keys read as
/// MISSING, JSON null as NULL, integer tokens as INT, other numbers as FLOAT.
/// Throws ParseError carrying the 1-based line number.
Table read(std::string_view text);
Table read_file(const std::string& path);

/// MISSING attributes are omitted; one object per line, '\n' terminated.
std::string write(const Table& table);
void write(const Table& table, std::ostream& out);
void write_file(const Table& table, const std::string& path);

/// Scalar conversions shared with the pipeline executor and HTTP connector.
/// Arrays and nested objects are rejected with EvalError.
Value to_value(const Json& j);
/// MISSING has no JSON form; callers omit it. Converting it here yields null.
Json to_json(const Value& v);
Record to_record(const Json& object);
Json to_json(const Record& record);

}  // namespace frameql::json_io
