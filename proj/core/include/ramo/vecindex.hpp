// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ramo/catalog.hpp"
#include "ramo/embedding.hpp"

namespace ramo {

struct SearchHit {
    CourseId course_id = 0;
    double score = 0.0;

    friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// Score descending, then course_id ascending. A total order on hits.
bool hit_before(const SearchHit& a, const SearchHit& b) noexcept;

/// Exact cosine index over course vectors. Vectors are stored as 32-bit
/// floats (the on-disk width), so an index compares equal to itself after a
/// save/load round trip. Immutable after construction; search is
/// thread-safe.
class VectorIndex {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    VectorIndex(std::size_t dim, std::string embedder_name, std::string catalog_fingerprint);

    /// Throws DimensionMismatch, or InvalidArgument on a duplicate id.
    void add(CourseId id, const EmbeddingVector& vector);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    const std::string& embedder_name() const noexcept { return embedder_name_; }
    const std::string& catalog_fingerprint() const noexcept { return catalog_fingerprint_; }

    CourseId id_at(std::size_t row) const noexcept { return ids_[row]; }
    std::span<const float> row(std::size_t row) const noexcept;
    /// Stored vector widened back to double.
    EmbeddingVector vector_at(std::size_t row) const;

    /// Top min(k, size()) hits by exhaustive scan. Throws DimensionMismatch.
    std::vector<SearchHit> search(const EmbeddingVector& query, std::size_t k) const;

    friend bool operator==(const VectorIndex&, const VectorIndex&) = default;

private:
    std::size_t dim_;
    std::string embedder_name_;
    std::string catalog_fingerprint_;
    std::vector<CourseId> ids_;
    std::vector<float> data_;  // row-major, size() * dim_
};

/// One vector per course, embedded from course_to_document in one batch.
/// Throws EmptyCatalog, or whatever the embedder throws.
VectorIndex build_index(const Catalog& catalog, const Embedder& embedder);

/// Binary layout, all integers little-endian:
///   magic "RAMOIDX\0" | u32 version | u32 dim | u64 count
///   | u32 len + embedder name | u32 len + fingerprint | u64 payload checksum
///   | count * (i64 course id, dim * f32)
/// The checksum is FNV-1a 64 over the payload bytes.
void save_index(const VectorIndex& index, std::ostream& sink);
void save_index_file(const VectorIndex& index, const std::string& path);

/// Throws FormatVersionMismatch, CorruptIndex or Io.
VectorIndex load_index(std::istream& source);
VectorIndex load_index_file(const std::string& path);

}  // namespace ramo
