// SPDX-License-Identifier: Apache-2.0
#include "ramo/vecindex.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "ramo/error.hpp"
#include "ramo/hash.hpp"

namespace ramo {

bool hit_before(const SearchHit& a, const SearchHit& b) noexcept {
    if (a.score != b.score) return a.score > b.score;
    return a.course_id < b.course_id;
}

VectorIndex::VectorIndex(std::size_t dim, std::string embedder_name,
                         std::string catalog_fingerprint)
    : dim_(dim),
      embedder_name_(std::move(embedder_name)),
      catalog_fingerprint_(std::move(catalog_fingerprint)) {
    if (dim == 0) throw Error(ErrorKind::InvalidArgument, "index dim must be positive");
}

void VectorIndex::add(CourseId id, const EmbeddingVector& vector) {
    if (vector.dim() != dim_) {
        throw Error(ErrorKind::DimensionMismatch,
                    "vector dim " + std::to_string(vector.dim()) + " != index dim " +
                        std::to_string(dim_));
    }
    if (std::find(ids_.begin(), ids_.end(), id) != ids_.end()) {
        throw Error(ErrorKind::InvalidArgument, "duplicate course id " + std::to_string(id));
    }
    ids_.push_back(id);
    for (double v : vector.values()) data_.push_back(static_cast<float>(v));
}

std::span<const float> VectorIndex::row(std::size_t r) const noexcept {
    return {data_.data() + r * dim_, dim_};
}

EmbeddingVector VectorIndex::vector_at(std::size_t r) const {
    const auto src = row(r);
    return EmbeddingVector(std::vector<double>(src.begin(), src.end()));
}

std::vector<SearchHit> VectorIndex::search(const EmbeddingVector& query, std::size_t k) const {
    if (query.dim() != dim_) {
        throw Error(ErrorKind::DimensionMismatch,
                    "query dim " + std::to_string(query.dim()) + " != index dim " +
                        std::to_string(dim_));
    }
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");

    const auto q = query.values();
    double qq = 0.0;
    for (double v : q) qq += v * v;

    std::vector<SearchHit> hits(ids_.size());
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        const float* row_data = data_.data() + r * dim_;
        double dot = 0.0;
        double rr = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double x = row_data[i];
            dot += q[i] * x;
            rr += x * x;
        }
        double score = 0.0;
        if (qq != 0.0 && rr != 0.0) {
            score = std::clamp(dot / (std::sqrt(qq) * std::sqrt(rr)), -1.0, 1.0);
        }
        hits[r] = {ids_[r], score};
    }

    const auto n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                      hit_before);
    hits.resize(n);
    return hits;
}

VectorIndex build_index(const Catalog& catalog, const Embedder& embedder) {
    if (catalog.empty()) throw Error(ErrorKind::EmptyCatalog, "cannot index an empty catalog");
    std::vector<std::string> docs;
    docs.reserve(catalog.size());
    for (const auto& c : catalog.courses()) docs.push_back(course_to_document(c));
    auto vectors = embedder.embed_batch(docs);
    if (vectors.size() != docs.size()) {
        throw Error(ErrorKind::ProviderFailure, "embedder returned the wrong number of vectors");
    }
    VectorIndex index(vectors.front().dim(), embedder.name(), catalog.fingerprint());
    for (std::size_t i = 0; i < vectors.size(); ++i) index.add(catalog.courses()[i].id, vectors[i]);
    return index;
}

namespace {

constexpr std::array<char, 8> kMagic{'R', 'A', 'M', 'O', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kMaxStringLen = 1U << 20;
constexpr std::uint32_t kMaxDim = 1U << 16;

template <typename T>
void put_le(std::string& out, T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>(u & 0xFF));
        u = static_cast<U>(u >> 8);
    }
}

void put_string(std::string& out, const std::string& s) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

void put_header_fields(std::string& out, std::uint32_t version, std::uint32_t dim, std::uint64_t count,
                       const std::string& name, const std::string& fingerprint) {
    put_le<std::uint32_t>(out, version);
    put_le<std::uint32_t>(out, dim);
    put_le<std::uint64_t>(out, count);
    put_string(out, name);
    put_string(out, fingerprint);
}

class ByteReader {
public:
    explicit ByteReader(std::istream& in) : in_(in) {}

    void read(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw Error(ErrorKind::CorruptIndex, "unexpected end of index data");
        }
    }

    template <typename T>
    T le() {
        std::array<unsigned char, sizeof(T)> buf{};
        read(reinterpret_cast<char*>(buf.data()), buf.size());
        std::make_unsigned_t<T> u = 0;
        for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<decltype(u)>((u << 8) | buf[i]);
        return static_cast<T>(u);
    }

    std::string str() {
        const auto len = le<std::uint32_t>();
        if (len > kMaxStringLen) throw Error(ErrorKind::CorruptIndex, "header string too long");
        std::string s(len, '\0');
        read(s.data(), len);
        return s;
    }

private:
    std::istream& in_;
};

}  // namespace

void save_index(const VectorIndex& index, std::ostream& sink) {
    std::string payload;
    payload.reserve(index.size() * (8 + 4 * index.dim()));
    for (std::size_t r = 0; r < index.size(); ++r) {
        put_le<std::int64_t>(payload, index.id_at(r));
        for (float f : index.row(r)) put_le<std::uint32_t>(payload, std::bit_cast<std::uint32_t>(f));
    }

    std::string header(kMagic.begin(), kMagic.end());
    put_header_fields(header, VectorIndex::kFormatVersion, static_cast<std::uint32_t>(index.dim()),
                      index.size(), index.embedder_name(), index.catalog_fingerprint());
    // The checksum covers the header fields after the magic and the payload.
    const auto header_hash = fnv1a64(std::string_view(header).substr(kMagic.size()));
    put_le<std::uint64_t>(header, fnv1a64(payload, header_hash));

    sink.write(header.data(), static_cast<std::streamsize>(header.size()));
    sink.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!sink) throw Error(ErrorKind::Io, "failed writing index");
}

void save_index_file(const VectorIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    save_index(index, out);
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path);
}

VectorIndex load_index(std::istream& source) {
    ByteReader in(source);
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (magic != kMagic) throw Error(ErrorKind::CorruptIndex, "bad magic");

    const auto version = in.le<std::uint32_t>();
    if (version != VectorIndex::kFormatVersion) {
        throw Error(ErrorKind::FormatVersionMismatch,
                    "index version " + std::to_string(version) + ", expected " +
                        std::to_string(VectorIndex::kFormatVersion));
    }
    const auto dim = in.le<std::uint32_t>();
    const auto count = in.le<std::uint64_t>();
    auto name = in.str();
    auto fingerprint = in.str();
    const auto checksum = in.le<std::uint64_t>();
    if (dim == 0 || dim > kMaxDim) {
        throw Error(ErrorKind::CorruptIndex, "implausible dimension " + std::to_string(dim));
    }

    std::string header_fields;
    put_header_fields(header_fields, version, dim, count, name, fingerprint);
    std::uint64_t running = fnv1a64(header_fields);

    VectorIndex index(dim, std::move(name), std::move(fingerprint));
    std::string row_bytes(8 + 4 * static_cast<std::size_t>(dim), '\0');
    std::vector<double> values(dim);
    for (std::uint64_t r = 0; r < count; ++r) {
        in.read(row_bytes.data(), row_bytes.size());
        running = fnv1a64(row_bytes, running);
        std::istringstream row_stream(row_bytes);
        ByteReader row(row_stream);
        const auto id = row.le<std::int64_t>();
        for (auto& v : values) v = std::bit_cast<float>(row.le<std::uint32_t>());
        try {
            index.add(id, EmbeddingVector(values));
        } catch (const Error& e) {
            throw Error(ErrorKind::CorruptIndex, e.detail());
        }
    }
    if (running != checksum) throw Error(ErrorKind::CorruptIndex, "checksum mismatch");
    if (source.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorKind::CorruptIndex, "trailing bytes after payload");
    }
    return index;
}

VectorIndex load_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    return load_index(in);
}

}  // namespace ramo
