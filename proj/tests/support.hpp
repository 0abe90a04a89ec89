// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "ramo/catalog.hpp"
#include "ramo/embedding.hpp"
#include "ramo/generation.hpp"
#include "ramo/prompting.hpp"
#include "ramo/recommender.hpp"
#include "ramo/vecindex.hpp"

namespace ramo::test {

inline std::filesystem::path fixture_dir() { return RAMO_FIXTURE_DIR; }
inline std::filesystem::path golden_dir() { return RAMO_GOLDEN_DIR; }
inline std::string fixture_csv() { return (fixture_dir() / "mini_catalog.csv").string(); }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::shared_ptr<const Catalog> fixture_catalog() {
    static const auto catalog = std::make_shared<const Catalog>(load_catalog_file(fixture_csv()));
    return catalog;
}

inline std::shared_ptr<const VectorIndex> fixture_index(std::size_t dim = DeterministicEmbedder::kDefaultDim) {
    DeterministicEmbedder embedder(dim);
    return std::make_shared<const VectorIndex>(build_index(*fixture_catalog(), embedder));
}

inline const Course& course_named(const Catalog& catalog, std::string_view name) {
    for (const auto& c : catalog.courses()) {
        if (c.name == name) return c;
    }
    throw std::runtime_error("no fixture course " + std::string(name));
}

struct Pipeline {
    std::shared_ptr<ScriptedGenerator> generator = std::make_shared<ScriptedGenerator>();
    std::shared_ptr<Recommender> recommender;
};

inline Pipeline fixture_pipeline(RecommenderConfig config = {}, PromptTemplate tmpl = default_template()) {
    Pipeline p;
    p.recommender = std::make_shared<Recommender>(fixture_catalog(), fixture_index(),
                                                  std::make_shared<DeterministicEmbedder>(), p.generator,
                                                  std::move(tmpl), config);
    return p;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("ramo-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Random printable words for property tests.
inline std::string random_words(std::mt19937_64& rng, std::size_t min_words, std::size_t max_words) {
    static const char* kWords[] = {"python", "data", "music", "learn",   "sql",    "design", "history",
                                   "course", "intro", "basics", "finance", "violin", "model",  "writing",
                                   "first",  "crash", "i",      "want",    "to",     "some",   "machine"};
    std::uniform_int_distribution<std::size_t> count(min_words, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kWords) - 1);
    std::string out;
    const auto n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.empty()) out += ' ';
        out += kWords[pick(rng)];
    }
    return out;
}

}  // namespace ramo::test
