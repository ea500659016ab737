#pragma once

#include <optional>
#include <string>

#include "frameql/connector.h"

namespace frameql {

struct HttpEndpointConfig {
    std::string base_url;  // "http://host:port"
    std::string query_path = "/query";
    /// Full header line value, e.g. "Authorization: Bearer abc".
    std::optional<std::string> auth_header;
    long timeout_ms = 30000;
    /// JSON pointer to the row array inside the response; empty means the
    /// body itself is the array.
    std::string response_rows_pointer;

    /// Keys: base_url, query_path, auth_header, timeout_ms, response_rows_pointer.
    static HttpEndpointConfig from_map(const ConnectorConfig& config);
};

/// POSTs the query text and decodes the row array from the JSON response.
/// Stateless per request; concurrent execute calls are allowed.
class HttpConnector : public Connector {
public:
    HttpConnector() = default;
    explicit HttpConnector(HttpEndpointConfig config);

    void initialize(const ConnectorConfig& config) override;
    RawResult execute(const QueryText& query) override;

    const HttpEndpointConfig& config() const noexcept { return config_; }

private:
    HttpEndpointConfig config_;
    bool ready_ = false;
};

}  // namespace frameql
