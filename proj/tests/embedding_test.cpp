// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "ramo/embedding.hpp"
#include "ramo/error.hpp"
#include "support.hpp"

namespace ramo {
namespace {

// Produced by tests/oracle/deterministic_embed.py.
constexpr double kCosPythonVsPythonCourse = 0.85634883857767552;
constexpr double kCosPythonVsBaroque = -0.082060993986221811;

TEST(CourseToDocument, ExactTemplate) {
    const auto& c = test::course_named(*test::fixture_catalog(), "Python Basics");
    EXPECT_EQ(course_to_document(c),
              "Title: Python Basics | University: U. Example | Difficulty: Beginner | Rating: 4.6 | "
              "Skills: python, loops | Description: Python basics course covering python data types, "
              "conditionals and loops.");
}

TEST(CourseToDocument, UnratedAndInjective) {
    const auto catalog = test::fixture_catalog();
    const auto& w = test::course_named(*catalog, "Academic Writing Essentials");
    EXPECT_NE(course_to_document(w).find("Rating: unrated"), std::string::npos);
    EXPECT_NE(course_to_document(w).find("Difficulty: Unrated"), std::string::npos);
    std::set<std::string> docs;
    for (const auto& c : catalog->courses()) docs.insert(course_to_document(c));
    EXPECT_EQ(docs.size(), catalog->size());
}

TEST(DeterministicEmbed, EmptyAndFeaturelessGiveZeroVector) {
    EXPECT_TRUE(deterministic_embed("", 256).is_zero());
    EXPECT_TRUE(deterministic_embed(" ,.;!  ", 256).is_zero());
    EXPECT_EQ(deterministic_embed("", 256).dim(), 256u);
}

TEST(DeterministicEmbed, UnitNormAndDimension) {
    DeterministicEmbedder e(256);
    const std::vector<std::string> texts{"python course"};
    const auto out = e.embed_batch(texts);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].dim(), 256u);
    EXPECT_NEAR(out[0].norm(), 1.0, 1e-9);
}

TEST(DeterministicEmbed, Deterministic) {
    DeterministicEmbedder e;
    const std::vector<std::string> texts{"a", "a"};
    const auto out = e.embed_batch(texts);
    EXPECT_EQ(out[0], out[1]);
    EXPECT_EQ(deterministic_embed("python", 256), deterministic_embed("python", 256));
}

TEST(DeterministicEmbed, MatchesReferenceBuckets) {
    const auto v = deterministic_embed("python", 256);
    const double a = 0.3779644730092272;  // 1/sqrt(7): one word plus six trigrams
    const std::map<std::size_t, double> expected{{18, -a}, {40, -a}, {58, a},  {104, -a},
                                                 {170, -a}, {208, -a}, {244, a}};
    for (std::size_t i = 0; i < v.dim(); ++i) {
        const auto it = expected.find(i);
        EXPECT_NEAR(v[i], it == expected.end() ? 0.0 : it->second, 1e-15) << "bucket " << i;
    }
    const auto w = deterministic_embed("C++ Basics", 16);
    const double b = 0.2672612419124244, c = 0.8017837257372732;
    const std::vector<double> expected16{0, b, 0, 0, -c, b, 0, -b, 0, 0, 0, 0, 0, -b, b, 0};
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(w[i], expected16[i], 1e-15) << "bucket " << i;
}

TEST(DeterministicEmbed, CaseInsensitiveAscii) {
    EXPECT_EQ(deterministic_embed("Python PROGRAMMING", 64), deterministic_embed("python programming", 64));
}

TEST(DeterministicEmbed, RelatedTextsScoreHigher) {
    const auto p = deterministic_embed("python programming", 256);
    const auto pc = deterministic_embed("python programming course", 256);
    const auto bv = deterministic_embed("baroque violin history", 256);
    const double related = cosine_similarity(p, pc);
    const double unrelated = cosine_similarity(p, bv);
    EXPECT_NEAR(related, kCosPythonVsPythonCourse, 1e-12);
    EXPECT_NEAR(unrelated, kCosPythonVsBaroque, 1e-12);
    EXPECT_GT(related, unrelated);
}

TEST(DeterministicEmbed, RejectsTinyDimension) {
    EXPECT_THROW(deterministic_embed("x", 7), Error);
    EXPECT_THROW(DeterministicEmbedder(4), Error);
}

TEST(DeterministicEmbed, UnitNormOnRandomText) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 500; ++i) {
        const auto text = test::random_words(rng, 1, 12);
        const auto v = deterministic_embed(text, 128);
        for (double x : v.values()) ASSERT_TRUE(std::isfinite(x));
        ASSERT_NEAR(v.norm(), 1.0, 1e-9) << text;
    }
}

TEST(DeterministicEmbedder, BatchPreservesOrderUnderPermutation) {
    DeterministicEmbedder e(64);
    std::vector<std::string> texts{"alpha", "beta gamma", "sql joins", "baroque", "python"};
    const auto base = e.embed_batch(texts);
    std::vector<std::size_t> perm{3, 0, 4, 1, 2};
    std::vector<std::string> shuffled;
    for (auto i : perm) shuffled.push_back(texts[i]);
    const auto out = e.embed_batch(shuffled);
    for (std::size_t j = 0; j < perm.size(); ++j) EXPECT_EQ(out[j], base[perm[j]]);
    EXPECT_THROW(e.embed_batch({}), Error);
    EXPECT_EQ(e.name(), "deterministic-fnv1a-64");
}

TEST(CosineSimilarity, AnalyticExamples) {
    const EmbeddingVector x({1.0, 0.0}), y({0.0, 1.0}), d({1.0, 1.0});
    EXPECT_DOUBLE_EQ(cosine_similarity(x, y), 0.0);
    EXPECT_NEAR(cosine_similarity(d, x), 0.7071, 1e-4);
    EXPECT_NEAR(cosine_similarity(d, x), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(cosine_similarity(d, d), 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(cosine_similarity(EmbeddingVector({-2.0, 0.0}), x), -1.0);
}

TEST(CosineSimilarity, ZeroNormGivesZero) {
    EXPECT_EQ(cosine_similarity(EmbeddingVector::zeros(3), EmbeddingVector({1.0, 2.0, 3.0})), 0.0);
}

TEST(CosineSimilarity, DimensionMismatch) {
    try {
        cosine_similarity(EmbeddingVector({1.0}), EmbeddingVector({1.0, 2.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(CosineSimilarity, SymmetricScaleInvariantAndBounded) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> scale(1e-3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> a(17), b(17);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng);
        const EmbeddingVector va(a), vb(b);
        const double s = cosine_similarity(va, vb);
        ASSERT_EQ(s, cosine_similarity(vb, va));
        ASSERT_GE(s, -1.0);
        ASSERT_LE(s, 1.0);
        const double c = scale(rng);
        for (auto& v : a) v *= c;
        ASSERT_NEAR(cosine_similarity(EmbeddingVector(a), vb), s, 1e-9);
    }
}

TEST(EmbeddingVector, RejectsNonFinite) {
    EXPECT_THROW(EmbeddingVector({1.0, std::nan("")}), Error);
    EXPECT_THROW(EmbeddingVector({INFINITY}), Error);
}

}  // namespace
}  // namespace ramo
