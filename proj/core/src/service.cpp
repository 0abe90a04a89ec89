// SPDX-License-Identifier: Apache-2.0
#include "ramo/service.hpp"

#include <algorithm>
#include <charconv>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ramo/error.hpp"
#include "ramo/text.hpp"

namespace ramo {

using nlohmann::json;

namespace {

ApiResponse error_response(int status, std::string_view kind, std::string_view detail,
                           std::string_view stage = {}) {
    json body{{"error", kind}, {"detail", detail}};
    if (!stage.empty()) body["stage"] = stage;
    return {status, body.dump()};
}

ApiResponse not_loaded() {
    return error_response(503, "IndexNotLoaded", "catalog and index are not loaded yet");
}

json recommendation_json(const ParsedRecommendation& rec, const Catalog& catalog) {
    json item;
    const Course* course = rec.course_id ? catalog.find(*rec.course_id) : nullptr;
    item["title"] = course ? course->name : rec.title_text;
    if (rec.url) {
        item["url"] = *rec.url;
    } else if (course && !course->url.empty()) {
        item["url"] = course->url;
    }
    if (course && course->rating) item["rating"] = *course->rating;
    if (course) item["course_id"] = course->id;
    if (rec.reason && !rec.reason->empty()) item["reason"] = *rec.reason;
    return item;
}

json recommendations_json(const RecommendationResponse& resp, const Catalog& catalog) {
    json items = json::array();
    for (const auto& rec : resp.recommendations) items.push_back(recommendation_json(rec, catalog));
    return items;
}

}  // namespace

ChatService::ChatService(std::chrono::minutes session_ttl) : sessions_(session_ttl) {}

void ChatService::set_pipeline(std::shared_ptr<const Recommender> pipeline) {
    std::lock_guard lock(pipeline_mutex_);
    pipeline_ = std::move(pipeline);
}

std::shared_ptr<const Recommender> ChatService::pipeline() const {
    std::lock_guard lock(pipeline_mutex_);
    return pipeline_;
}

ApiResponse ChatService::chat(std::string_view request_body,
                              const std::optional<std::string>& provider_key) {
    const auto rec = pipeline();
    if (!rec) return not_loaded();

    json request;
    try {
        request = json::parse(request_body);
    } catch (const json::parse_error& e) {
        return error_response(400, "MalformedJson", e.what());
    }
    if (!request.is_object()) return error_response(400, "MalformedJson", "body must be a JSON object");
    const auto msg_it = request.find("message");
    if (msg_it == request.end() || !msg_it->is_string()) {
        return error_response(400, "MalformedJson", "\"message\" must be a string");
    }
    std::string session_id;
    if (auto it = request.find("session_id"); it != request.end() && !it->is_null()) {
        if (!it->is_string()) return error_response(400, "MalformedJson", "\"session_id\" must be a string");
        session_id = it->get<std::string>();
    }
    const auto message = msg_it->get<std::string>();
    if (trim(message).empty()) return error_response(400, "EmptyQuestion", "message is empty");

    RequestContext ctx;
    if (provider_key && !provider_key->empty()) ctx.api_key = *provider_key;

    auto slot = sessions_.acquire(session_id);
    try {
        RecommendationResponse resp;
        {
            std::lock_guard turn(slot->turn_lock);
            resp = rec->recommend(slot->session, message, ctx);
            slot->last_used = Clock::now();
        }
        json body{
            {"session_id", slot->session.id()},
            {"reply", resp.reply},
            {"recommendations", recommendations_json(resp, rec->catalog())},
            {"source", to_string(resp.source)},
            {"latency_ms", resp.latency.total_ms},
            {"latency_breakdown",
             {{"embed_ms", resp.latency.embed_ms},
              {"search_ms", resp.latency.search_ms},
              {"generate_ms", resp.latency.generate_ms}}},
        };
        return {200, body.dump()};
    } catch (const Error& e) {
        if (e.is_provider_error()) {
            spdlog::warn("chat: provider error at stage '{}': {}", e.stage(), e.detail());
            return error_response(502, to_string(e.kind()), e.detail(), e.stage());
        }
        if (e.kind() == ErrorKind::EmptyQuestion || e.kind() == ErrorKind::BudgetTooSmall) {
            return error_response(400, to_string(e.kind()), e.detail(), e.stage());
        }
        spdlog::error("chat: {}", e.what());
        return error_response(500, to_string(e.kind()), e.detail(), e.stage());
    } catch (const std::exception& e) {
        spdlog::error("chat: {}", e.what());
        return error_response(500, "Internal", e.what());
    }
}

ApiResponse ChatService::defaults(const std::optional<std::string>& k_param) const {
    const auto rec = pipeline();
    if (!rec) return not_loaded();
    std::size_t k = kDefaultsK;
    if (k_param) {
        const auto& s = *k_param;
        long long v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v < 1 ||
            v > static_cast<long long>(kDefaultsMaxK)) {
            return error_response(400, "InvalidArgument",
                                  "k must be an integer in [1, " + std::to_string(kDefaultsMaxK) + "]");
        }
        k = static_cast<std::size_t>(v);
    }
    const auto resp = rec->default_recommendations(k);
    json body{
        {"reply", resp.reply},
        {"recommendations", recommendations_json(resp, rec->catalog())},
        {"source", to_string(resp.source)},
    };
    return {200, body.dump()};
}

ApiResponse ChatService::health() const {
    const auto rec = pipeline();
    if (!rec) return {503, json{{"status", "unavailable"}}.dump()};
    json body{
        {"status", "ok"},
        {"catalog_count", rec->catalog().size()},
        {"index_dim", rec->index().dim()},
        {"embedder", rec->embedder().name()},
        {"generator", rec->generator().name()},
    };
    return {200, body.dump()};
}

struct HttpServer::Impl {
    ChatService& service;
    std::vector<std::string> origins;
    httplib::Server server;

    Impl(ChatService& s, std::vector<std::string> o) : service(s), origins(std::move(o)) {}

    void add_cors(const httplib::Request& req, httplib::Response& res) const {
        if (!req.has_header("Origin")) return;
        const auto origin = req.get_header_value("Origin");
        const bool any = std::find(origins.begin(), origins.end(), "*") != origins.end();
        if (!any && std::find(origins.begin(), origins.end(), origin) == origins.end()) return;
        res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
        res.set_header("Vary", "Origin");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Provider-Key");
    }

    static void reply(httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_content(api.body, "application/json");
    }

    void install_routes() {
        server.Post("/api/chat", [this](const httplib::Request& req, httplib::Response& res) {
            std::optional<std::string> key;
            if (req.has_header("X-Provider-Key")) key = req.get_header_value("X-Provider-Key");
            reply(res, service.chat(req.body, key));
        });
        server.Get("/api/defaults", [this](const httplib::Request& req, httplib::Response& res) {
            std::optional<std::string> k;
            if (req.has_param("k")) k = req.get_param_value("k");
            reply(res, service.defaults(k));
        });
        server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
            reply(res, service.health());
        });
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server.set_post_routing_handler(
            [this](const httplib::Request& req, httplib::Response& res) { add_cors(req, res); });
        server.set_exception_handler(
            [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
                std::string what = "unknown error";
                try {
                    std::rethrow_exception(ep);
                } catch (const std::exception& e) {
                    what = e.what();
                } catch (...) {
                }
                spdlog::error("http: {}", what);
                reply(res, error_response(500, "Internal", what));
            });
        server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
            spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
        });
    }
};

HttpServer::HttpServer(ChatService& service, std::vector<std::string> cors_allowed_origins,
                       std::size_t threads)
    : impl_(std::make_unique<Impl>(service, std::move(cors_allowed_origins))) {
    if (threads == 0) throw Error(ErrorKind::InvalidArgument, "http threads must be at least 1");
    impl_->server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    impl_->install_routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

bool HttpServer::is_running() const { return impl_->server.is_running(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::pair<std::string, int> parse_listen_address(std::string_view address) {
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        throw Error(ErrorKind::InvalidConfig, "listen address must look like host:port");
    }
    const auto port_text = address.substr(colon + 1);
    int port = -1;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() ||
        port < 0 || port > 65535) {
        throw Error(ErrorKind::InvalidConfig, "bad port in listen address '" + std::string(address) + "'");
    }
    auto host = std::string(address.substr(0, colon));
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    return {host, port};
}

}  // namespace ramo
