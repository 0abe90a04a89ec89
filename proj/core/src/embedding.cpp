// SPDX-License-Identifier: Apache-2.0
#include "ramo/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "ramo/error.hpp"
#include "ramo/hash.hpp"
#include "ramo/text.hpp"

namespace ramo {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite embedding entry");
    }
}

EmbeddingVector EmbeddingVector::zeros(std::size_t dim) {
    return EmbeddingVector(std::vector<double>(dim, 0.0));
}

double EmbeddingVector::norm() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

bool EmbeddingVector::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

EmbeddingVector Embedder::embed(const std::string& text, const RequestContext& ctx) const {
    auto out = embed_batch(std::span<const std::string>(&text, 1), ctx);
    return std::move(out.front());
}

namespace {

bool is_word_byte(unsigned char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
}

// Second hash for the sign: FNV-1a continued from a fixed salt, then the
// splitmix64 finalizer. FNV's low bit is only the parity of the input bytes.
constexpr std::uint64_t kSignSalt = fnv1a64("ramo/sign");

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

EmbeddingVector deterministic_embed(std::string_view text, std::size_t dim) {
    if (dim < 8) throw Error(ErrorKind::InvalidArgument, "deterministic embedder needs dim >= 8");

    const std::string lower = ascii_lower(text);
    std::vector<std::string_view> words;
    for (std::size_t i = 0; i < lower.size();) {
        if (!is_word_byte(static_cast<unsigned char>(lower[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < lower.size() && is_word_byte(static_cast<unsigned char>(lower[j]))) ++j;
        words.emplace_back(lower.data() + i, j - i);
        i = j;
    }

    std::vector<double> acc(dim, 0.0);
    if (words.empty()) return EmbeddingVector(std::move(acc));

    auto add = [&](std::string_view feature) {
        const auto bucket = fnv1a64(feature) % dim;
        const bool even = (mix64(fnv1a64(feature, kSignSalt)) & 1U) == 0;
        acc[bucket] += even ? 1.0 : -1.0;
    };

    std::string feature;
    std::string joined = " ";
    for (auto w : words) {
        feature.assign("w|").append(w);
        add(feature);
        joined.append(w).push_back(' ');
    }
    for (std::size_t i = 0; i + 3 <= joined.size(); ++i) {
        feature.assign("t|").append(joined, i, 3);
        add(feature);
    }

    double sq = 0.0;
    for (double v : acc) sq += v * v;
    if (sq == 0.0) return EmbeddingVector(std::move(acc));
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : acc) v *= inv;
    return EmbeddingVector(std::move(acc));
}

DeterministicEmbedder::DeterministicEmbedder(std::size_t dim) : dim_(dim) {
    if (dim < 8) throw Error(ErrorKind::InvalidArgument, "deterministic embedder needs dim >= 8");
}

std::string DeterministicEmbedder::name() const { return "deterministic-fnv1a-" + std::to_string(dim_); }

std::vector<EmbeddingVector> DeterministicEmbedder::embed_batch(std::span<const std::string> texts,
                                                                const RequestContext&) const {
    if (texts.empty()) throw Error(ErrorKind::InvalidArgument, "embed_batch needs at least one text");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(deterministic_embed(t, dim_));
    return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    return cosine_similarity(a.values(), b.values());
}

std::string course_to_document(const Course& course) {
    std::string skills;
    for (std::size_t i = 0; i < course.skills.size(); ++i) {
        if (i) skills += ", ";
        skills += course.skills[i];
    }
    std::string doc;
    doc.reserve(96 + course.name.size() + course.description.size() + skills.size());
    doc.append("Title: ").append(course.name);
    doc.append(" | University: ").append(course.university);
    doc.append(" | Difficulty: ").append(to_string(course.difficulty));
    doc.append(" | Rating: ").append(course.rating ? format_rating(*course.rating) : "unrated");
    doc.append(" | Skills: ").append(skills);
    doc.append(" | Description: ").append(course.description);
    return doc;
}

}  // namespace ramo
