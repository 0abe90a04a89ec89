// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ramo/config.hpp"
#include "ramo/recommender.hpp"

namespace ramo {

struct ApiResponse {
    int status = 200;
    std::string body;  // JSON
};

inline constexpr std::size_t kDefaultsK = 5;
inline constexpr std::size_t kDefaultsMaxK = 50;
inline constexpr std::size_t kDefaultHttpThreads = 16;

/// Transport-independent handlers for the JSON API. The pipeline can be
/// swapped in after construction; until then every endpoint answers 503.
class ChatService {
public:
    explicit ChatService(std::chrono::minutes session_ttl = std::chrono::minutes{60});

    void set_pipeline(std::shared_ptr<const Recommender> pipeline);
    std::shared_ptr<const Recommender> pipeline() const;

    /// POST /api/chat
    ApiResponse chat(std::string_view request_body,
                     const std::optional<std::string>& provider_key = std::nullopt);
    /// GET /api/defaults?k=
    ApiResponse defaults(const std::optional<std::string>& k_param) const;
    /// GET /healthz
    ApiResponse health() const;

    SessionStore& sessions() noexcept { return sessions_; }

private:
    mutable std::mutex pipeline_mutex_;
    std::shared_ptr<const Recommender> pipeline_;
    SessionStore sessions_;
};

/// HTTP/1.1 front end for ChatService.
class HttpServer {
public:
    /// `threads` request workers; connections beyond that wait in the queue.
    HttpServer(ChatService& service, std::vector<std::string> cors_allowed_origins,
               std::size_t threads = kDefaultHttpThreads);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds host:port; port 0 picks a free port. Returns the bound port or
    /// -1 on failure.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop().
    bool listen_after_bind();
    void stop();
    bool is_running() const;
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Splits "host:port"; throws InvalidConfig.
std::pair<std::string, int> parse_listen_address(std::string_view address);

}  // namespace ramo
