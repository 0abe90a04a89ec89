// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <string>

#include "ramo/generation.hpp"
#include "ramo/provider.hpp"

namespace ramo {

struct RemoteGeneratorConfig {
    ProviderEndpoint endpoint = make_endpoint("https://api.openai.com/v1/chat/completions", "gpt-3.5-turbo");
    GenerationParams params;
};

/// OpenAI-style chat completion client. template_part goes out as the
/// system message, context_part + question_part as the user message.
class RemoteGenerator final : public Generator {
public:
    explicit RemoteGenerator(RemoteGeneratorConfig config);

    std::string name() const override { return "remote"; }
    std::string model() const override { return config_.endpoint.model; }
    GenerationParams params() const override { return config_.params; }

    std::string generate(const ComposedPrompt& prompt,
                         const RequestContext& ctx = {}) const override;

    /// Wall clock of the most recent successful call, retries included.
    double last_latency_ms() const noexcept { return last_latency_ms_.load(); }

private:
    RemoteGeneratorConfig config_;
    mutable std::atomic<double> last_latency_ms_{0.0};
};

}  // namespace ramo
