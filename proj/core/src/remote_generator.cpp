// SPDX-License-Identifier: Apache-2.0
#include "ramo/remote_generator.hpp"

#include <chrono>

#include <nlohmann/json.hpp>

#include "provider_http.hpp"
#include "ramo/error.hpp"
#include "ramo/text.hpp"

namespace ramo {

using nlohmann::json;

RemoteGenerator::RemoteGenerator(RemoteGeneratorConfig config) : config_(std::move(config)) {}

std::string RemoteGenerator::generate(const ComposedPrompt& prompt,
                                      const RequestContext& ctx) const {
    const std::string key = ctx.api_key.value_or(config_.endpoint.api_key);
    if (key.empty()) throw Error(ErrorKind::ProviderAuth, "chat: no API key configured");

    json request;
    request["model"] = config_.endpoint.model;
    request["temperature"] = config_.params.temperature;
    request["max_tokens"] = config_.params.max_reply_tokens;
    request["messages"] = json::array({
        {{"role", "system"}, {"content", prompt.template_part}},
        {{"role", "user"}, {"content", prompt.context_part + prompt.question_part}},
    });

    const auto start = std::chrono::steady_clock::now();
    const auto body = detail::post_json(config_.endpoint, request.dump(), key, "chat");
    const auto elapsed = std::chrono::steady_clock::now() - start;

    std::string content;
    try {
        const auto reply = json::parse(body);
        const auto& msg = reply.at("choices").at(0).at("message");
        if (msg.contains("content") && msg["content"].is_string()) {
            content = msg["content"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ProviderFailure, std::string("chat: unexpected response: ") + e.what());
    }
    if (trim(content).empty()) throw Error(ErrorKind::EmptyReply, "chat: provider returned no text");

    last_latency_ms_.store(std::chrono::duration<double, std::milli>(elapsed).count());
    return content;
}

}  // namespace ramo
