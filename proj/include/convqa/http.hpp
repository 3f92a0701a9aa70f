#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <string>

namespace convqa {

/// Attempts with exponential backoff. Only transport failures (no response)
/// and 5xx responses are retried; other statuses fail immediately.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;
    /// Injected so tests do not wait; defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;

    [[nodiscard]] std::chrono::milliseconds backoff_before(int attempt) const;  // attempt is 2-based
};

struct HttpEndpoint {
    std::string url;  // scheme://host[:port]/path
    std::map<std::string, std::string> headers;
    double timeout_seconds = 30.0;
};

struct HttpResponse {
    int status = 0;
    std::string body;
    int attempts = 0;
};

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/'
};

/// Throws FormatError for URLs without a scheme.
[[nodiscard]] UrlParts split_url(const std::string& url);

/// POST `body` as application/json. Returns the first 2xx response; throws
/// TransportError carrying the last status (0 for no response) otherwise.
[[nodiscard]] HttpResponse post_json(const HttpEndpoint& endpoint, const std::string& body, const RetryPolicy& retry);

/// GET with the same retry semantics.
[[nodiscard]] HttpResponse http_get(const HttpEndpoint& endpoint, const RetryPolicy& retry);

}  // namespace convqa
