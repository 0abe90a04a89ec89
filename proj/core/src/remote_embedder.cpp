// SPDX-License-Identifier: Apache-2.0
#include "ramo/remote_embedder.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <nlohmann/json.hpp>

#include "provider_http.hpp"
#include "ramo/error.hpp"
#include "ramo/text.hpp"

namespace ramo {

using nlohmann::json;

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {
    if (config_.batch_size == 0) config_.batch_size = 1;
    if (config_.max_in_flight == 0) config_.max_in_flight = 1;
}

std::string RemoteEmbedder::name() const { return "remote:" + config_.endpoint.model; }

void RemoteEmbedder::expect_dim(std::size_t dim) {
    std::lock_guard lock(pin_mutex_);
    dim_.store(dim);
}

void RemoteEmbedder::check_dim(std::size_t got) const {
    std::lock_guard lock(pin_mutex_);
    const auto pinned = dim_.load();
    if (pinned == 0) {
        dim_.store(got);
    } else if (pinned != got) {
        throw Error(ErrorKind::DimensionMismatch, "provider returned dim " + std::to_string(got) +
                                                      ", pinned " + std::to_string(pinned));
    }
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_chunk(std::span<const std::string> texts,
                                                         const std::string& key) const {
    json request;
    request["model"] = config_.endpoint.model;
    request["input"] = json::array();
    for (const auto& t : texts) request["input"].push_back(t);

    const auto body = detail::post_json(config_.endpoint, request.dump(), key, "embeddings");

    json reply;
    try {
        reply = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ProviderFailure, std::string("embeddings: bad JSON: ") + e.what());
    }
    if (!reply.contains("data") || !reply["data"].is_array() ||
        reply["data"].size() != texts.size()) {
        throw Error(ErrorKind::ProviderFailure, "embeddings: response does not match request size");
    }

    std::vector<EmbeddingVector> out(texts.size());
    std::vector<bool> filled(texts.size(), false);
    std::size_t position = 0;
    for (const auto& item : reply["data"]) {
        std::size_t slot = position++;
        if (item.contains("index") && item["index"].is_number_unsigned()) {
            slot = item["index"].get<std::size_t>();
        }
        if (slot >= texts.size() || filled[slot] || !item.contains("embedding") ||
            !item["embedding"].is_array()) {
            throw Error(ErrorKind::ProviderFailure, "embeddings: malformed data entry");
        }
        std::vector<double> values;
        values.reserve(item["embedding"].size());
        for (const auto& v : item["embedding"]) {
            if (!v.is_number()) throw Error(ErrorKind::ProviderFailure, "embeddings: non-numeric entry");
            values.push_back(v.get<double>());
        }
        check_dim(values.size());
        out[slot] = EmbeddingVector(std::move(values));
        filled[slot] = true;
    }
    return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts,
                                                         const RequestContext& ctx) const {
    if (texts.empty()) throw Error(ErrorKind::InvalidArgument, "embed_batch needs at least one text");
    for (const auto& t : texts) {
        if (utf8_length(t) > config_.max_text_chars) {
            throw Error(ErrorKind::InvalidArgument, "text exceeds provider max length");
        }
    }
    const std::string key = ctx.api_key.value_or(config_.endpoint.api_key);
    if (key.empty()) throw Error(ErrorKind::ProviderAuth, "embeddings: no API key configured");

    const std::size_t n_chunks = (texts.size() + config_.batch_size - 1) / config_.batch_size;
    std::vector<std::vector<EmbeddingVector>> results(n_chunks);
    std::vector<std::exception_ptr> errors(n_chunks);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t c = next++; c < n_chunks; c = next++) {
            const auto begin = c * config_.batch_size;
            const auto len = std::min(config_.batch_size, texts.size() - begin);
            try {
                results[c] = embed_chunk(texts.subspan(begin, len), key);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };

    const std::size_t n_threads = std::min(config_.max_in_flight, n_chunks);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (auto& chunk : results) {
        for (auto& v : chunk) out.push_back(std::move(v));
    }
    return out;
}

}  // namespace ramo
