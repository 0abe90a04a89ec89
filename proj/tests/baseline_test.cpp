// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ramo/baseline.hpp"
#include "ramo/error.hpp"
#include "support.hpp"

namespace ramo {
namespace {

const std::string kHeader =
    "Course Name,University,Difficulty Level,Course Rating,Course URL,Course Description,Skills\n";

Catalog catalog_from(const std::string& csv) {
    std::istringstream in(csv);
    return load_catalog(in);
}

ErrorKind baseline_error(const TfidfModel& model, std::string_view query, double min_sim = kDefaultMinSimilarity) {
    try {
        baseline_recommend(model, query, 5, min_sim);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for '" << query << "'";
    return ErrorKind::InvalidArgument;
}

TEST(TfidfTokenize, Rules) {
    EXPECT_EQ(tfidf_tokenize("I am a NEW-user, C++ x2"),
              (std::vector<std::string>{"am", "new", "user", "x2"}));
    EXPECT_EQ(tfidf_tokenize("caf\xC3\xA9 ok"), (std::vector<std::string>{"caf\xC3\xA9", "ok"}));
    EXPECT_TRUE(tfidf_tokenize("a b c ! ?").empty());
}

TEST(BuildTfidf, FixtureShapeAndIdf) {
    const auto model = build_tfidf(*test::fixture_catalog());
    EXPECT_EQ(model.doc_vectors.size(), 10u);
    EXPECT_EQ(model.doc_ids.size(), 10u);
    EXPECT_EQ(model.vocabulary.size(), 104u);  // tests/oracle/tfidf.py
    EXPECT_EQ(model.catalog_fingerprint, test::fixture_catalog()->fingerprint());
    // "baroque" occurs in exactly one of 10 courses: ln(11/2) + 1.
    EXPECT_NEAR(model.idf.at(model.vocabulary.at("baroque")), std::log(11.0 / 2.0) + 1.0, 1e-12);
    EXPECT_NEAR(model.idf.at(model.vocabulary.at("baroque")), 2.7047, 1e-4);
    EXPECT_NEAR(model.idf.at(model.vocabulary.at("python")), 1.7884573603642702, 1e-12);
    EXPECT_NEAR(model.idf.at(model.vocabulary.at("and")), 1.095310179804325, 1e-12);
    for (double w : model.idf) EXPECT_GT(w, 0.0);
    for (const auto& v : model.doc_vectors) {
        if (v.empty()) continue;
        double sq = 0.0;
        for (const auto& [t, w] : v) sq += w * w;
        EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-9);
        for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v[i - 1].first, v[i].first);
    }
}

TEST(BuildTfidf, TermInEveryDocHasUnitIdf) {
    const auto catalog = catalog_from(kHeader + "Alpha,U,Beginner,4,u1,common alpha,x\n"
                                                "Beta,U,Beginner,4,u2,common beta,x\n"
                                                "Gamma,U,Beginner,4,u3,common gamma,x\n");
    const auto model = build_tfidf(catalog);
    EXPECT_DOUBLE_EQ(model.idf.at(model.vocabulary.at("common")), 1.0);
    EXPECT_DOUBLE_EQ(model.idf.at(model.vocabulary.at("alpha")), std::log(4.0 / 2.0) + 1.0);
    EXPECT_EQ(model.vocabulary.count("x"), 0u);  // single character
}

TEST(BuildTfidf, Deterministic) {
    const auto a = build_tfidf(*test::fixture_catalog());
    const auto b = build_tfidf(catalog_from(test::read_file(test::fixture_csv())));
    EXPECT_EQ(a.vocabulary, b.vocabulary);
    EXPECT_EQ(a.idf, b.idf);
    EXPECT_EQ(a.doc_vectors, b.doc_vectors);
}

TEST(BuildTfidf, EmptyCatalog) {
    try {
        build_tfidf(Catalog({}, "empty"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyCatalog);
    }
}

TEST(BaselineRecommend, PythonMatchesOracle) {
    const auto& catalog = *test::fixture_catalog();
    const auto model = build_tfidf(catalog);
    const auto hits = baseline_recommend(model, "python", 5);
    // tests/oracle/tfidf.py: only the four python courses clear 0.05.
    const std::vector<std::pair<std::string, double>> expected{
        {"Crash Course on Python", 0.6720791939094665},
        {"Python Basics", 0.6374381809475739},
        {"Introduction to Python", 0.5588440751025434},
        {"First Python Program", 0.5169527001696882},
    };
    ASSERT_EQ(hits.size(), expected.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        EXPECT_EQ(hits[i].course_id, test::course_named(catalog, expected[i].first).id);
        EXPECT_NEAR(hits[i].score, expected[i].second, 1e-12);
    }
    const auto loops = baseline_recommend(model, "python loops", 1);
    ASSERT_EQ(loops.size(), 1u);
    EXPECT_EQ(loops[0].course_id, test::course_named(catalog, "Python Basics").id);
    EXPECT_NEAR(loops[0].score, 0.7147970563895543, 1e-12);
}

TEST(BaselineRecommend, ColdStartIsNoMatch) {
    const auto model = build_tfidf(*test::fixture_catalog());
    EXPECT_EQ(baseline_error(model, "I am a new user"), ErrorKind::NoMatch);
    EXPECT_EQ(baseline_error(model, ""), ErrorKind::NoMatch);
}

TEST(BaselineRecommend, NoMatchExactlyWhenConditionHolds) {
    const auto model = build_tfidf(*test::fixture_catalog());
    // Vocabulary overlap, so no NoMatch at threshold 0 ...
    EXPECT_FALSE(baseline_recommend(model, "and", 10, 0.0).empty());
    // ... but nothing clears an unreachable threshold.
    EXPECT_EQ(baseline_error(model, "and", 1.01), ErrorKind::NoMatch);
    // The best score for "and" decides the boundary.
    const auto best = baseline_recommend(model, "and", 1, 0.0).front().score;
    EXPECT_NO_THROW(baseline_recommend(model, "and", 1, best));
    EXPECT_EQ(baseline_error(model, "and", std::nextafter(best, 2.0)), ErrorKind::NoMatch);
}

TEST(BaselineRecommend, FewerThanKAboveThreshold) {
    const auto model = build_tfidf(*test::fixture_catalog());
    EXPECT_EQ(baseline_recommend(model, "SQL databases", 5).size(), 1u);
    EXPECT_THROW(baseline_recommend(model, "python", 0), Error);
}

TEST(BaselineRecommend, SelfRetrieval) {
    const auto& catalog = *test::fixture_catalog();
    const auto model = build_tfidf(catalog);
    for (const auto& c : catalog.courses()) {
        std::string doc = c.name;
        for (const auto& s : c.skills) doc += " " + s;
        doc += " " + c.description;
        const auto hits = baseline_recommend(model, doc, 1);
        ASSERT_EQ(hits.size(), 1u);
        EXPECT_EQ(hits[0].course_id, c.id) << c.name;
        EXPECT_NEAR(hits[0].score, 1.0, 1e-9);
    }
}

TEST(Median, OddEvenEmpty) {
    EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
    EXPECT_THROW(median({}), Error);
}

std::vector<std::string> fixture_queries() {
    std::vector<std::string> out;
    std::istringstream in(test::read_file(test::fixture_dir() / "queries.txt"));
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.front() != '#') out.push_back(line);
    }
    return out;
}

TEST(CompareLatency, ReportShape) {
    auto p = test::fixture_pipeline();
    const auto model = build_tfidf(p.recommender->catalog());
    const auto queries = fixture_queries();
    ASSERT_EQ(queries.size(), 5u);
    const auto report = compare_latency(queries, *p.recommender, model, 10);
    EXPECT_EQ(report.repetitions, 10u);
    ASSERT_EQ(report.rows.size(), 5u);
    EXPECT_EQ(p.generator->calls(), 50u);
    ASSERT_TRUE(report.median_rag_ms.has_value());
    ASSERT_TRUE(report.median_baseline_ms.has_value());
    ASSERT_TRUE(report.median_delta_ms.has_value());

    bool saw_cold_start = false;
    for (const auto& row : report.rows) {
        ASSERT_TRUE(row.rag_ms.has_value()) << row.query;
        EXPECT_TRUE(row.rag_error.empty());
        EXPECT_GE(*row.rag_ms, 0.0);
        if (row.query == "I am a new user") {
            saw_cold_start = true;
            EXPECT_EQ(row.baseline_error, "NoMatch");
            EXPECT_FALSE(row.baseline_ms.has_value());
            EXPECT_FALSE(row.delta_ms().has_value());
        } else {
            ASSERT_TRUE(row.baseline_ms.has_value()) << row.query;
            EXPECT_DOUBLE_EQ(*row.delta_ms(), *row.baseline_ms - *row.rag_ms);
        }
    }
    EXPECT_TRUE(saw_cold_start);

    std::ostringstream table, csv;
    report.write_table(table);
    report.write_csv(csv);
    EXPECT_NE(table.str().find("baseline_ms"), std::string::npos);
    EXPECT_NE(table.str().find("NoMatch"), std::string::npos);
    EXPECT_NE(table.str().find("median"), std::string::npos);
    std::istringstream lines(csv.str());
    std::vector<std::string> rows;
    for (std::string line; std::getline(lines, line);) rows.push_back(line);
    ASSERT_EQ(rows.size(), 7u);  // header + 5 queries + summary
    EXPECT_EQ(rows.front(), "query,rag_ms,embed_ms,search_ms,generate_ms,baseline_ms,delta_ms");
    EXPECT_EQ(rows.back().rfind("median,", 0), 0u);
}

TEST(CompareLatency, NeedsThreeRepetitions) {
    auto p = test::fixture_pipeline();
    const auto model = build_tfidf(p.recommender->catalog());
    const std::vector<std::string> queries{"python"};
    EXPECT_THROW(compare_latency(queries, *p.recommender, model, 2), Error);
}

}  // namespace
}  // namespace ramo
