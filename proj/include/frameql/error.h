#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace frameql {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text; `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) {
            return what;
        }
        std::string out = "line " + std::to_string(line);
        if (column != 0) {
            out += ", column " + std::to_string(column);
        }
        return out + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> diagnostics = {})
        : Error(what), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

/// A mask or operand frame does not descend from the same scan.
class LineageError : public Error {
public:
    using Error::Error;
};

/// Result had the wrong shape for the action (e.g. count returned several rows).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Evaluation failure inside the reference executors.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Connector failure; carries the rendered query that was being executed.
class ConnectorError : public Error {
public:
    ConnectorError(const std::string& what, std::string query)
        : Error(what + "\nquery: " + query), query_(std::move(query)) {}

    const std::string& query() const noexcept { return query_; }

private:
    std::string query_;
};

}  // namespace frameql
