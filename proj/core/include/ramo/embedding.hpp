// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ramo/catalog.hpp"

namespace ramo {

/// Dense embedding. Entries are finite; dim() == values.size().
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values);

    static EmbeddingVector zeros(std::size_t dim);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    double norm() const noexcept;
    bool is_zero() const noexcept;

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    std::vector<double> values_;
};

/// Per-request knobs that callers may pass through to a provider.
struct RequestContext {
    std::optional<std::string> api_key;  // overrides the configured credential
};

/// Turns text into vectors of a fixed dimension. Implementations are safe
/// for concurrent use.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::string name() const = 0;
    /// 0 for a remote embedder whose dimension is not yet known.
    virtual std::size_t dim() const = 0;

    /// One vector per input, same order. Throws Error on provider failure.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                                     const RequestContext& ctx = {}) const = 0;

    EmbeddingVector embed(const std::string& text, const RequestContext& ctx = {}) const;
};

/// Signed feature hashing over word unigrams and character trigrams,
/// L2-normalized. Pure; identical output on every platform.
EmbeddingVector deterministic_embed(std::string_view text, std::size_t dim);

class DeterministicEmbedder final : public Embedder {
public:
    static constexpr std::size_t kDefaultDim = 256;

    explicit DeterministicEmbedder(std::size_t dim = kDefaultDim);

    std::string name() const override;
    std::size_t dim() const override { return dim_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                             const RequestContext& ctx = {}) const override;

private:
    std::size_t dim_;
};

/// dot(a,b) / (|a||b|), clamped to [-1,1]; 0 when either norm is 0.
/// Throws Error{DimensionMismatch}.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// "Title: … | University: … | Difficulty: … | Rating: … | Skills: … | Description: …"
std::string course_to_document(const Course& course);

}  // namespace ramo
