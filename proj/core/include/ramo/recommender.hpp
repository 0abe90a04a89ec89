// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ramo/catalog.hpp"
#include "ramo/embedding.hpp"
#include "ramo/generation.hpp"
#include "ramo/prompting.hpp"
#include "ramo/vecindex.hpp"

namespace ramo {

using Clock = std::chrono::system_clock;

struct ChatTurn {
    std::string user_message;
    std::string reply;
    Clock::time_point timestamp;
};

/// Append-only transcript. Timestamps never go backwards: a turn stamped
/// earlier than the last one is clamped to it.
class ChatSession {
public:
    explicit ChatSession(std::string id, Clock::time_point created_at = Clock::now());

    const std::string& id() const noexcept { return id_; }
    Clock::time_point created_at() const noexcept { return created_at_; }
    const std::vector<ChatTurn>& turns() const noexcept { return turns_; }

    void append(std::string user_message, std::string reply,
                Clock::time_point at = Clock::now());

private:
    std::string id_;
    Clock::time_point created_at_;
    std::vector<ChatTurn> turns_;
};

enum class ResponseSource : std::uint8_t { Rag, Defaults };
std::string_view to_string(ResponseSource s) noexcept;

struct LatencyBreakdown {
    double embed_ms = 0.0;
    double search_ms = 0.0;
    double generate_ms = 0.0;
    double total_ms = 0.0;
};

struct RecommendationResponse {
    std::string reply;
    std::vector<ParsedRecommendation> recommendations;
    ResponseSource source = ResponseSource::Rag;
    std::vector<SearchHit> retrieval_hits;  // hits that made it into the prompt
    LatencyBreakdown latency;
    std::string prompt;  // serialized generator input, empty for defaults
};

struct RecommenderConfig {
    std::size_t top_k = 8;
    std::size_t token_budget = kDefaultTokenBudget;
    std::size_t reply_reserve = kReplyReserveTokens;
    PromptOrder prompt_order = PromptOrder::TemplateContextQuestion;
    std::size_t history_turns = 0;
};

/// Catalog, index, template and the two providers. Shared read-only across
/// threads; sessions carry all per-conversation state.
class Recommender {
public:
    Recommender(std::shared_ptr<const Catalog> catalog, std::shared_ptr<const VectorIndex> index,
                std::shared_ptr<const Embedder> embedder,
                std::shared_ptr<const Generator> generator, PromptTemplate tmpl,
                RecommenderConfig config = {});

    /// embed -> search -> render -> compose -> fit -> generate -> parse.
    /// Appends the turn to `session` on success. Provider errors come back
    /// tagged with the stage that raised them.
    RecommendationResponse recommend(ChatSession& session, std::string_view message,
                                     const RequestContext& ctx = {}) const;

    RecommendationResponse default_recommendations(std::size_t k = 5) const;

    const Catalog& catalog() const noexcept { return *catalog_; }
    const VectorIndex& index() const noexcept { return *index_; }
    const Embedder& embedder() const noexcept { return *embedder_; }
    const Generator& generator() const noexcept { return *generator_; }
    const PromptTemplate& prompt_template() const noexcept { return template_; }
    const RecommenderConfig& config() const noexcept { return config_; }

private:
    std::shared_ptr<const Catalog> catalog_;
    std::shared_ptr<const VectorIndex> index_;
    std::shared_ptr<const Embedder> embedder_;
    std::shared_ptr<const Generator> generator_;
    PromptTemplate template_;
    RecommenderConfig config_;
};

/// Greeting plus the top-rated courses; never touches the generator.
RecommendationResponse default_recommendations(const Catalog& catalog, std::size_t k = 5);

/// Always true: every message takes the retrieval path and the template's
/// instructions cover users who state no preference. The UI's initial
/// course list comes from default_recommendations instead.
bool handle_cold_start(std::string_view message) noexcept;

/// Mutex that admits waiters in arrival order.
class FifoMutex {
public:
    void lock();
    void unlock();

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::uint64_t next_ticket_ = 0;
    std::uint64_t serving_ = 0;
};

/// In-memory sessions with idle-time eviction.
class SessionStore {
public:
    explicit SessionStore(std::chrono::minutes ttl = std::chrono::minutes{60});

    struct Slot {
        FifoMutex turn_lock;
        ChatSession session;
        Clock::time_point last_used;
        explicit Slot(std::string id) : session(std::move(id)), last_used(Clock::now()) {}
    };

    /// Returns the live slot for `id`, or creates one. An empty or invalid id
    /// gets a freshly generated one.
    std::shared_ptr<Slot> acquire(const std::string& id);

    std::size_t size() const;
    std::size_t evict_expired(Clock::time_point now = Clock::now());
    std::shared_ptr<Slot> find(const std::string& id) const;

    static bool valid_id(std::string_view id) noexcept;
    static std::string new_id();

private:
    std::chrono::minutes ttl_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<Slot>> slots_;
};

}  // namespace ramo
