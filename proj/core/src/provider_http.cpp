// SPDX-License-Identifier: Apache-2.0
#include "provider_http.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "ramo/error.hpp"

namespace ramo {

std::chrono::milliseconds RetryPolicy::backoff_for(int attempt) const {
    const double scale = std::pow(multiplier, std::max(0, attempt - 1));
    return std::chrono::milliseconds(static_cast<long long>(initial_backoff.count() * scale));
}

std::string redact(std::string text, const std::string& secret) {
    if (secret.empty()) return text;
    for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos + 3)) {
        text.replace(pos, secret.size(), "***");
    }
    return text;
}

namespace detail {
namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorKind::InvalidConfig, "provider url needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

enum class Outcome { Ok, Retry, Fail };

}  // namespace

std::string post_json(const ProviderEndpoint& endpoint, const std::string& body,
                      const std::string& api_key, std::string_view what) {
    const auto [origin, path] = split_url(endpoint.url);
    const int attempts = std::max(1, endpoint.retry.max_attempts);

    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    Error last(ErrorKind::ProviderFailure, std::string(what) + ": no attempt made");
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        httplib::Client client(origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
        const auto usecs =
            std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        spdlog::debug("{} request #{} to {}: {}", what, attempt, endpoint.url,
                      redact(body, api_key));
        auto res = client.Post(path, headers, body, "application/json");

        Outcome outcome = Outcome::Fail;
        if (!res) {
            const auto err = res.error();
            const bool timeout = err == httplib::Error::ConnectionTimeout ||
                                 err == httplib::Error::Read || err == httplib::Error::Write;
            last = Error(timeout ? ErrorKind::ProviderTimeout : ErrorKind::ProviderFailure,
                         std::string(what) + ": " + httplib::to_string(err));
            outcome = timeout ? Outcome::Retry : Outcome::Fail;
        } else {
            spdlog::debug("{} response {}: {}", what, res->status, redact(res->body, api_key));
            const int status = res->status;
            if (status >= 200 && status < 300) return res->body;
            const std::string msg =
                std::string(what) + ": HTTP " + std::to_string(status);
            if (status == 401 || status == 403) {
                last = Error(ErrorKind::ProviderAuth, msg);
            } else if (status == 429) {
                last = Error(ErrorKind::ProviderRateLimit, msg);
                outcome = Outcome::Retry;
            } else if (status == 408 || status == 504) {
                last = Error(ErrorKind::ProviderTimeout, msg);
                outcome = Outcome::Retry;
            } else {
                last = Error(ErrorKind::ProviderFailure, msg);
            }
        }
        if (outcome == Outcome::Fail || attempt == attempts) break;
        std::this_thread::sleep_for(endpoint.retry.backoff_for(attempt));
    }
    throw last;
}

}  // namespace detail
}  // namespace ramo
