// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ramo/catalog.hpp"
#include "ramo/embedding.hpp"
#include "ramo/prompting.hpp"

namespace ramo {

struct GenerationParams {
    double temperature = 0.0;
    int max_reply_tokens = 512;
};

/// One prompt in, one non-empty reply out. Implementations are safe for
/// concurrent calls.
class Generator {
public:
    virtual ~Generator() = default;

    virtual std::string name() const = 0;
    virtual std::string model() const = 0;
    virtual GenerationParams params() const { return {}; }

    virtual std::string generate(const ComposedPrompt& prompt,
                                 const RequestContext& ctx = {}) const = 0;
};

inline constexpr std::string_view kScriptedPreamble = "Sure! Here are some recommended courses:";
inline constexpr std::string_view kDontKnowReply = "I don't know";
inline constexpr std::size_t kScriptedDefaultCap = 5;

/// Deterministic stand-in for a chat model. Lists the first N context
/// courses, N = min(requested_count or 5, blocks); "I don't know" when the
/// context is empty. URL/Rating lines are echoed when the context carries
/// them.
std::string scripted_generate(const ComposedPrompt& prompt);

class ScriptedGenerator final : public Generator {
public:
    std::string name() const override { return "scripted"; }
    std::string model() const override { return "scripted-v1"; }

    std::string generate(const ComposedPrompt& prompt,
                         const RequestContext& ctx = {}) const override;

    std::size_t calls() const noexcept { return calls_.load(); }

private:
    mutable std::atomic<std::size_t> calls_{0};
};

struct ParsedRecommendation {
    std::optional<CourseId> course_id;
    std::string title_text;
    std::optional<std::string> url;
    std::optional<std::string> reason;

    friend bool operator==(const ParsedRecommendation&, const ParsedRecommendation&) = default;
};

/// Context block as rendered by render_context, label -> value.
struct ContextBlock {
    std::vector<std::pair<std::string, std::string>> fields;
    std::optional<std::string> get(std::string_view label) const;
};
std::vector<ContextBlock> parse_context_blocks(std::string_view context);

/// Pulls numbered or bulleted items out of a reply and resolves titles
/// against the catalog: exact normalized match first, then a unique
/// case-insensitive substring match. Ambiguous or unknown titles keep
/// course_id empty.
std::vector<ParsedRecommendation> parse_recommendations(std::string_view reply,
                                                        const Catalog& catalog);

/// Title resolution on its own, exposed for tests.
std::optional<CourseId> match_title(std::string_view title, const Catalog& catalog);

}  // namespace ramo
