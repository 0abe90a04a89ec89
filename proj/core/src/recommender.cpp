// SPDX-License-Identifier: Apache-2.0
#include "ramo/recommender.hpp"

#include <algorithm>
#include <random>

#include "ramo/error.hpp"
#include "ramo/text.hpp"

namespace ramo {

ChatSession::ChatSession(std::string id, Clock::time_point created_at)
    : id_(std::move(id)), created_at_(created_at) {}

void ChatSession::append(std::string user_message, std::string reply, Clock::time_point at) {
    if (!turns_.empty()) at = std::max(at, turns_.back().timestamp);
    at = std::max(at, created_at_);
    turns_.push_back({std::move(user_message), std::move(reply), at});
}

std::string_view to_string(ResponseSource s) noexcept {
    return s == ResponseSource::Rag ? "rag" : "defaults";
}

Recommender::Recommender(std::shared_ptr<const Catalog> catalog,
                         std::shared_ptr<const VectorIndex> index,
                         std::shared_ptr<const Embedder> embedder,
                         std::shared_ptr<const Generator> generator, PromptTemplate tmpl,
                         RecommenderConfig config)
    : catalog_(std::move(catalog)),
      index_(std::move(index)),
      embedder_(std::move(embedder)),
      generator_(std::move(generator)),
      template_(std::move(tmpl)),
      config_(config) {
    if (!catalog_ || !index_ || !embedder_ || !generator_) {
        throw Error(ErrorKind::InvalidArgument, "recommender needs catalog, index and providers");
    }
    if (config_.top_k == 0) throw Error(ErrorKind::InvalidArgument, "top_k must be at least 1");
    if (config_.token_budget <= config_.reply_reserve) {
        throw Error(ErrorKind::InvalidArgument, "token budget must exceed the reply reserve");
    }
    template_.validate();
}

namespace {

using Steady = std::chrono::steady_clock;

double ms_since(Steady::time_point start) {
    return std::chrono::duration<double, std::milli>(Steady::now() - start).count();
}

template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw e.with_stage(stage);
    }
}

}  // namespace

RecommendationResponse Recommender::recommend(ChatSession& session, std::string_view message,
                                              const RequestContext& ctx) const {
    if (trim(message).empty()) throw Error(ErrorKind::EmptyQuestion, "message is empty");
    const auto start = Steady::now();
    RecommendationResponse resp;
    resp.source = ResponseSource::Rag;

    auto t = Steady::now();
    const auto query =
        staged("embed", [&] { return embedder_->embed(std::string(message), ctx); });
    resp.latency.embed_ms = ms_since(t);

    t = Steady::now();
    const auto hits = staged("search", [&] { return index_->search(query, config_.top_k); });
    resp.latency.search_ms = ms_since(t);

    std::string question;
    if (config_.history_turns > 0 && !session.turns().empty()) {
        const auto& turns = session.turns();
        const auto n = std::min(config_.history_turns, turns.size());
        question = "Previous conversation:\n";
        for (auto it = turns.end() - static_cast<std::ptrdiff_t>(n); it != turns.end(); ++it) {
            question += "User: " + it->user_message + "\nAssistant: " + it->reply + "\n";
        }
        question += "\n";
    }
    question.append(message);

    const auto fitted = staged("prompt", [&] {
        const auto context = render_context(hits, *catalog_, template_.detail_fields);
        const auto composed = compose_prompt(template_, context, question, config_.prompt_order);
        return fit_to_budget(composed, hits, *catalog_, template_,
                             config_.token_budget - config_.reply_reserve);
    });

    t = Steady::now();
    resp.reply = staged("generate", [&] { return generator_->generate(fitted.prompt, ctx); });
    resp.latency.generate_ms = ms_since(t);

    resp.recommendations = parse_recommendations(resp.reply, *catalog_);
    resp.retrieval_hits = fitted.hits;
    resp.prompt = fitted.prompt.serialize();
    resp.latency.total_ms = ms_since(start);
    resp.latency.total_ms = std::max({resp.latency.total_ms, resp.latency.embed_ms,
                                      resp.latency.search_ms, resp.latency.generate_ms});

    session.append(std::string(message), resp.reply);
    return resp;
}

RecommendationResponse Recommender::default_recommendations(std::size_t k) const {
    return ramo::default_recommendations(*catalog_, k);
}

RecommendationResponse default_recommendations(const Catalog& catalog, std::size_t k) {
    const auto start = Steady::now();
    RecommendationResponse resp;
    resp.source = ResponseSource::Defaults;
    resp.reply = "Welcome! Here are some popular courses to get you started:";
    std::size_t i = 0;
    for (const auto& c : top_rated(catalog, k)) {
        resp.reply += "\n" + std::to_string(++i) + ". " + c.name;
        ParsedRecommendation rec;
        rec.course_id = c.id;
        rec.title_text = c.name;
        if (!c.url.empty()) rec.url = c.url;
        resp.recommendations.push_back(std::move(rec));
    }
    resp.latency.total_ms = ms_since(start);
    return resp;
}

bool handle_cold_start(std::string_view) noexcept { return true; }

void FifoMutex::lock() {
    std::unique_lock lock(mutex_);
    const auto ticket = next_ticket_++;
    cv_.wait(lock, [&] { return serving_ == ticket; });
}

void FifoMutex::unlock() {
    {
        std::lock_guard lock(mutex_);
        ++serving_;
    }
    cv_.notify_all();
}

SessionStore::SessionStore(std::chrono::minutes ttl) : ttl_(ttl) {}

bool SessionStore::valid_id(std::string_view id) noexcept {
    if (id.empty() || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '-' || c == '_';
    });
}

std::string SessionStore::new_id() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    for (int part = 0; part < 2; ++part) {
        auto bits = rng();
        for (int i = 0; i < 16; ++i, bits >>= 4) id.push_back(kHex[bits & 0xF]);
    }
    return id;
}

std::shared_ptr<SessionStore::Slot> SessionStore::acquire(const std::string& id) {
    const auto now = Clock::now();
    std::lock_guard lock(mutex_);
    for (auto it = slots_.begin(); it != slots_.end();) {
        it = (now - it->second->last_used > ttl_) ? slots_.erase(it) : std::next(it);
    }
    if (valid_id(id)) {
        if (auto it = slots_.find(id); it != slots_.end()) {
            it->second->last_used = now;
            return it->second;
        }
        auto slot = std::make_shared<Slot>(id);
        slots_.emplace(id, slot);
        return slot;
    }
    std::string fresh;
    do {
        fresh = new_id();
    } while (slots_.contains(fresh));
    auto slot = std::make_shared<Slot>(fresh);
    slots_.emplace(fresh, slot);
    return slot;
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = slots_.find(id);
    return it == slots_.end() ? nullptr : it->second;
}

std::size_t SessionStore::size() const {
    std::lock_guard lock(mutex_);
    return slots_.size();
}

std::size_t SessionStore::evict_expired(Clock::time_point now) {
    std::lock_guard lock(mutex_);
    return std::erase_if(slots_, [&](const auto& kv) { return now - kv.second->last_used > ttl_; });
}

}  // namespace ramo
