// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstddef>
#include <mutex>
#include <string>

#include "ramo/embedding.hpp"
#include "ramo/provider.hpp"

namespace ramo {

struct RemoteEmbedderConfig {
    ProviderEndpoint endpoint = make_endpoint("https://api.openai.com/v1/embeddings", "text-embedding-ada-002");
    std::size_t batch_size = 64;
    std::size_t max_in_flight = 4;
    std::size_t max_text_chars = 32000;
};

/// Client for an OpenAI-style embeddings endpoint:
///   POST {"input": [...], "model": "..."} -> {"data": [{"embedding": [...]}, ...]}
/// The dimension is pinned by the first successful response; any later
/// response of a different width raises DimensionMismatch.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(RemoteEmbedderConfig config);

    std::string name() const override;
    std::size_t dim() const override { return dim_.load(); }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                             const RequestContext& ctx = {}) const override;

    /// Pins the dimension up front, e.g. from a loaded index.
    void expect_dim(std::size_t dim);

private:
    std::vector<EmbeddingVector> embed_chunk(std::span<const std::string> texts,
                                             const std::string& key) const;
    void check_dim(std::size_t got) const;

    RemoteEmbedderConfig config_;
    mutable std::atomic<std::size_t> dim_{0};
    mutable std::mutex pin_mutex_;
};

}  // namespace ramo
