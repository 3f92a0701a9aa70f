#include "convqa/http.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>

#include "convqa/error.hpp"

namespace convqa {
namespace {

httplib::Headers to_headers(const std::map<std::string, std::string>& headers) {
    httplib::Headers out;
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
}

template <typename Call>
HttpResponse with_retry(const HttpEndpoint& endpoint, const RetryPolicy& retry, Call&& call) {
    const UrlParts url = split_url(endpoint.url);
    httplib::Client client(url.origin);
    const auto secs = static_cast<time_t>(endpoint.timeout_seconds);
    const auto usecs = static_cast<time_t>((endpoint.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    const int attempts = std::max(1, retry.max_attempts);
    int last_status = 0;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            const auto wait = retry.backoff_before(attempt);
            if (retry.sleep) {
                retry.sleep(wait);
            } else {
                std::this_thread::sleep_for(wait);
            }
        }
        httplib::Result res = call(client, url.path, to_headers(endpoint.headers));
        if (!res) {
            last_status = 0;
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return {res->status, res->body, attempt};
        last_status = res->status;
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status < 500) break;
    }
    throw TransportError(endpoint.url + ": " + last_error, last_status);
}

}  // namespace

std::chrono::milliseconds RetryPolicy::backoff_before(int attempt) const {
    const double factor = std::pow(multiplier, std::max(0, attempt - 2));
    return std::chrono::milliseconds(static_cast<long long>(static_cast<double>(initial_backoff.count()) * factor));
}

UrlParts split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw FormatError("URL without scheme: " + url);
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

HttpResponse post_json(const HttpEndpoint& endpoint, const std::string& body, const RetryPolicy& retry) {
    return with_retry(endpoint, retry, [&](httplib::Client& c, const std::string& path, const httplib::Headers& h) {
        return c.Post(path, h, body, "application/json");
    });
}

HttpResponse http_get(const HttpEndpoint& endpoint, const RetryPolicy& retry) {
    return with_retry(endpoint, retry, [&](httplib::Client& c, const std::string& path, const httplib::Headers& h) {
        return c.Get(path, h);
    });
}

}  // namespace convqa
