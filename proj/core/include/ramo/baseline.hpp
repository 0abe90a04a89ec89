// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ramo/catalog.hpp"
#include "ramo/recommender.hpp"
#include "ramo/vecindex.hpp"

namespace ramo {

/// (term index, weight), sorted by term index.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

/// Content-based TF-IDF model over name + skills + description.
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1, document vectors L2-normalized.
struct TfidfModel {
    std::map<std::string, std::uint32_t> vocabulary;
    std::vector<double> idf;
    std::vector<CourseId> doc_ids;
    std::vector<SparseVector> doc_vectors;
    std::string catalog_fingerprint;

    SparseVector vectorize(std::string_view text) const;
};

/// Lower-case, split on anything but ASCII letters/digits (non-ASCII bytes
/// count as letters), drop tokens shorter than two bytes.
std::vector<std::string> tfidf_tokenize(std::string_view text);

/// Throws EmptyCatalog.
TfidfModel build_tfidf(const Catalog& catalog);

inline constexpr double kDefaultMinSimilarity = 0.05;

/// Top-k by sparse cosine, keeping only hits >= min_similarity. Throws
/// NoMatch when the query shares no vocabulary or nothing clears the bar.
std::vector<SearchHit> baseline_recommend(const TfidfModel& model, std::string_view query,
                                          std::size_t k,
                                          double min_similarity = kDefaultMinSimilarity);

struct LatencyRow {
    std::string query;
    std::optional<double> rag_ms;       // median total
    std::optional<double> embed_ms;     // median per stage
    std::optional<double> search_ms;
    std::optional<double> generate_ms;
    std::optional<double> baseline_ms;  // median
    std::string rag_error;              // ErrorKind name when the RAG path failed
    std::string baseline_error;

    std::optional<double> delta_ms() const;  // baseline - rag
};

struct LatencyReport {
    std::vector<LatencyRow> rows;
    std::size_t repetitions = 0;
    std::optional<double> median_rag_ms;
    std::optional<double> median_baseline_ms;
    std::optional<double> median_delta_ms;

    void write_table(std::ostream& out) const;
    void write_csv(std::ostream& out) const;
};

double median(std::vector<double> values);

/// Runs every query `repetitions` times through both engines and reports
/// medians. Engine errors are recorded per row. Throws InvalidArgument when
/// repetitions < 3.
LatencyReport compare_latency(std::span<const std::string> queries, const Recommender& rag,
                              const TfidfModel& baseline, std::size_t repetitions,
                              std::size_t k = 5);

}  // namespace ramo
