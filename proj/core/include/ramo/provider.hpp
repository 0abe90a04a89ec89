// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <utility>

namespace ramo {

/// Bounded retry with exponential backoff. Only timeouts and rate limits are
/// retried; everything else fails on the first attempt.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;

    std::chrono::milliseconds backoff_for(int attempt) const;  // attempt is 1-based
};

/// Where and how to reach an HTTPS JSON provider.
struct ProviderEndpoint {
    std::string url;      // full URL, e.g. https://api.openai.com/v1/embeddings
    std::string model;
    std::string api_key;  // sent as "Authorization: Bearer <key>"
    std::chrono::milliseconds timeout{30000};
    RetryPolicy retry;
};

inline ProviderEndpoint make_endpoint(std::string url, std::string model) {
    ProviderEndpoint e;
    e.url = std::move(url);
    e.model = std::move(model);
    return e;
}

/// Replaces every occurrence of `secret` in `text` with "***".
std::string redact(std::string text, const std::string& secret);

}  // namespace ramo
