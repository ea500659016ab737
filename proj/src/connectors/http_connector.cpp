#include "frameql/http_connector.h"

#include <chrono>

#include <httplib.h>

#include "frameql/error.h"
#include "frameql/json_io.h"

namespace frameql {

HttpEndpointConfig HttpEndpointConfig::from_map(const ConnectorConfig& config) {
    HttpEndpointConfig c;
    auto get = [&](const char* key) -> const std::string* {
        auto it = config.find(key);
        return it == config.end() ? nullptr : &it->second;
    };
    if (auto* v = get("base_url")) c.base_url = *v;
    if (auto* v = get("query_path")) c.query_path = *v;
    if (auto* v = get("auth_header")) c.auth_header = *v;
    if (auto* v = get("response_rows_pointer")) c.response_rows_pointer = *v;
    if (auto* v = get("timeout_ms")) {
        try {
            c.timeout_ms = std::stol(*v);
        } catch (const std::exception&) {
            throw Error("timeout_ms is not a number: '" + *v + "'");
        }
    }
    return c;
}

HttpConnector::HttpConnector(HttpEndpointConfig config) {
    ConnectorConfig m{{"base_url", config.base_url},
                      {"query_path", config.query_path},
                      {"timeout_ms", std::to_string(config.timeout_ms)},
                      {"response_rows_pointer", config.response_rows_pointer}};
    if (config.auth_header) m["auth_header"] = *config.auth_header;
    initialize(m);
}

void HttpConnector::initialize(const ConnectorConfig& config) {
    HttpEndpointConfig c = HttpEndpointConfig::from_map(config);
    if (c.base_url.empty()) throw Error("http connector: base_url is required");
    if (c.timeout_ms <= 0) throw Error("http connector: timeout_ms must be positive");
    if (c.query_path.empty() || c.query_path[0] != '/') c.query_path = "/" + c.query_path;
    if (c.auth_header && c.auth_header->find(':') == std::string::npos) {
        throw Error("http connector: auth_header must look like 'Name: value'");
    }
    config_ = std::move(c);
    ready_ = true;
}

namespace {

std::string excerpt(const std::string& body) {
    constexpr std::size_t kMax = 200;
    if (body.size() <= kMax) return body;
    return body.substr(0, kMax) + "...";
}

}  // namespace

RawResult HttpConnector::execute(const QueryText& query) {
    const std::string text = query.render();
    if (!ready_) throw ConnectorError("http connector used before initialize()", text);

    httplib::Client client(config_.base_url);
    if (!client.is_valid()) throw ConnectorError("invalid base_url '" + config_.base_url + "'", text);
    const time_t sec = config_.timeout_ms / 1000;
    const time_t usec = (config_.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    httplib::Headers headers;
    if (config_.auth_header) {
        const std::string& h = *config_.auth_header;
        std::size_t colon = h.find(':');
        std::string value = h.substr(colon + 1);
        while (!value.empty() && value.front() == ' ') value.erase(0, 1);
        headers.emplace(h.substr(0, colon), value);
    }

    auto started = std::chrono::steady_clock::now();
    auto res = client.Post(config_.query_path, headers, text, "text/plain; charset=utf-8");
    if (!res) {
        auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
        auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= config_.timeout_ms)) {
            throw ConnectorError("request timed out after " + std::to_string(config_.timeout_ms) + " ms", text);
        }
        throw ConnectorError("transport failure: " + httplib::to_string(err), text);
    }
    if (res->status < 200 || res->status >= 300) {
        throw ConnectorError("HTTP " + std::to_string(res->status) + ": " + excerpt(res->body), text);
    }

    json_io::Json body;
    try {
        body = json_io::Json::parse(res->body);
    } catch (const json_io::Json::parse_error& e) {
        throw ConnectorError("malformed response envelope: not JSON: " + excerpt(res->body), text);
    }
    const json_io::Json* rows = &body;
    if (!config_.response_rows_pointer.empty()) {
        try {
            rows = &body.at(json_io::Json::json_pointer(config_.response_rows_pointer));
        } catch (const std::exception& e) {
            throw ConnectorError("malformed response envelope: no rows at '" + config_.response_rows_pointer + "'",
                                 text);
        }
    }
    if (!rows->is_array()) throw ConnectorError("malformed response envelope: rows are not an array", text);
    Table table;
    table.rows.reserve(rows->size());
    for (const auto& row : *rows) {
        try {
            if (row.is_object()) {
                table.rows.push_back(json_io::to_record(row));
            } else {
                // Scalar rows (e.g. SELECT VALUE results) become one-column records.
                Record r;
                r.set("value", json_io::to_value(row));
                table.rows.push_back(std::move(r));
            }
        } catch (const Error& e) {
            throw ConnectorError(std::string("malformed response envelope: ") + e.what(), text);
        }
    }
    return RawResult{std::move(table)};
}

}  // namespace frameql
