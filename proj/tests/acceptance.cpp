// SPDX-License-Identifier: Apache-2.0
// ramo_acceptance: one PASS/FAIL/SKIP line per acceptance criterion.
// Runs offline with the deterministic embedder and the scripted generator.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ramo/baseline.hpp"
#include "ramo/error.hpp"
#include "ramo/service.hpp"
#include "support.hpp"

namespace {

using namespace ramo;
using Steady = std::chrono::steady_clock;

enum class Outcome { Pass, Fail, Skip };

struct Result {
    Outcome outcome;
    std::string detail;
};

Result pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Result fail(std::string d) { return {Outcome::Fail, std::move(d)}; }
Result skip(std::string d) { return {Outcome::Skip, std::move(d)}; }

double seconds_since(Steady::time_point t) {
    return std::chrono::duration<double>(Steady::now() - t).count();
}

ErrorKind kind_of(const std::function<void()>& f, bool& threw) {
    threw = false;
    try {
        f();
    } catch (const Error& e) {
        threw = true;
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

// 1. Ingestion counts.
Result dataset_ingestion() {
    auto t = Steady::now();
    LoadStats stats;
    const auto catalog = load_catalog_file(test::fixture_csv(), {}, &stats);
    const double fixture_s = seconds_since(t);
    if (stats.rows != 12 || stats.retained != 10 || catalog.size() != 10) {
        return fail("fixture: rows=" + std::to_string(stats.rows) + " deduped=" + std::to_string(stats.retained) +
                    ", expected rows=12 deduped=10");
    }
    if (fixture_s >= 5.0) return fail("fixture ingest took " + std::to_string(fixture_s) + " s");
    std::string fixture_note = "fixture rows=12 deduped=10";

    const char* kaggle = std::getenv("RAMO_KAGGLE_CSV");
    if (!kaggle || !*kaggle) {
        return skip(fixture_note + "; Kaggle 3,342 target not checked (set RAMO_KAGGLE_CSV to the Coursera CSV)");
    }
    t = Steady::now();
    LoadStats kstats;
    const auto full = load_catalog_file(kaggle, {}, &kstats);
    const double kaggle_s = seconds_since(t);
    const double deviation = std::abs(static_cast<double>(full.size()) - 3342.0) / 3342.0;
    std::ostringstream d;
    d << fixture_note << "; Kaggle rows=" << kstats.rows << " deduped=" << kstats.retained << " ("
      << deviation * 100.0 << "% from 3342) in " << kaggle_s << " s";
    if (deviation > 0.01) return fail(d.str() + ", outside +-1%");
    if (kaggle_s >= 5.0) return fail(d.str() + ", slower than 5 s");
    return pass(d.str());
}

// Independent top-k: score every row in double, sort the whole list.
std::vector<SearchHit> brute_force(const VectorIndex& index, const EmbeddingVector& q, std::size_t k) {
    std::vector<SearchHit> all;
    for (std::size_t r = 0; r < index.size(); ++r) {
        const auto row = index.row(r);
        double dot = 0.0, qq = 0.0, rr = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const double x = row[i];
            dot += q[i] * x;
            qq += q[i] * q[i];
            rr += x * x;
        }
        const double s = (qq == 0.0 || rr == 0.0) ? 0.0 : std::clamp(dot / (std::sqrt(qq) * std::sqrt(rr)), -1.0, 1.0);
        all.push_back({index.id_at(r), s});
    }
    std::sort(all.begin(), all.end(), [](const SearchHit& a, const SearchHit& b) {
        return a.score > b.score || (a.score == b.score && a.course_id < b.course_id);
    });
    all.resize(std::min(k, all.size()));
    return all;
}

// 2. Retrieval equals brute force.
Result retrieval_oracle() {
    const auto t = Steady::now();
    const auto index = test::fixture_index();
    DeterministicEmbedder embedder;
    std::mt19937_64 rng(2024);
    std::size_t checks = 0;
    for (int i = 0; i < 100; ++i) {
        const auto query = test::random_words(rng, 1, 10);
        const auto q = embedder.embed(query);
        for (std::size_t k : {1, 3, 5, 8}) {
            const auto got = index->search(q, k);
            const auto want = brute_force(*index, q, k);
            if (got.size() != want.size()) return fail("size mismatch for '" + query + "'");
            for (std::size_t j = 0; j < got.size(); ++j) {
                if (got[j].course_id != want[j].course_id) {
                    return fail("order differs for '" + query + "' k=" + std::to_string(k));
                }
            }
            ++checks;
        }
    }
    const double s = seconds_since(t);
    if (s >= 10.0) return fail("took " + std::to_string(s) + " s");
    return pass(std::to_string(checks) + " searches identical to brute force in " + std::to_string(s) + " s");
}

// 3. Cold start: baseline fails, RAG answers over HTTP.
Result cold_start() {
    const std::string message = "I am a new user";
    const auto model = build_tfidf(*test::fixture_catalog());
    bool threw = false;
    const auto kind = kind_of([&] { baseline_recommend(model, message, 5); }, threw);
    if (!threw || kind != ErrorKind::NoMatch) return fail("baseline did not raise NoMatch");

    ChatService service;
    service.set_pipeline(test::fixture_pipeline().recommender);
    HttpServer server(service, {});
    const int port = server.bind("127.0.0.1", 0);
    if (port <= 0) return fail("could not bind a local port");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    auto res = client.Post("/api/chat", nlohmann::json{{"message", message}}.dump(), "application/json");
    server.stop();
    th.join();
    if (!res) return fail("no HTTP response: " + httplib::to_string(res.error()));
    if (res->status != 200) return fail("HTTP " + std::to_string(res->status) + ": " + res->body);
    const auto n = nlohmann::json::parse(res->body).at("recommendations").size();
    if (n < 1) return fail("RAG returned no recommendations");
    return pass("baseline NoMatch; RAG HTTP 200 with " + std::to_string(n) + " recommendations");
}

// 4. Requested count honoured.
Result count_conformance() {
    const auto templates = load_template_dir(test::fixture_dir() / "templates");
    std::ostringstream d;
    for (const auto& [id, n] : {std::pair<std::string, int>{"recommend-one", 1}, {"recommend-three", 3},
                                {"recommend-five", 5}}) {
        const auto it = templates.find(id);
        if (it == templates.end()) return fail("missing template " + id);
        if (it->second.requested_count != n) return fail(id + " requested_count mismatch");
        auto p = test::fixture_pipeline({}, it->second);
        std::mt19937_64 rng(static_cast<unsigned>(n) * 7919u);
        for (int i = 0; i < 50; ++i) {
            ChatSession session("acceptance");
            const auto query = test::random_words(rng, 1, 10);
            const auto resp = p.recommender->recommend(session, query);
            if (resp.recommendations.size() != static_cast<std::size_t>(n)) {
                return fail(id + ": '" + query + "' gave " + std::to_string(resp.recommendations.size()));
            }
            std::set<CourseId> context;
            for (const auto& h : resp.retrieval_hits) context.insert(h.course_id);
            for (const auto& r : resp.recommendations) {
                if (!r.course_id || !context.contains(*r.course_id)) {
                    return fail(id + ": '" + r.title_text + "' not in retrieved context");
                }
            }
        }
        d << id << " x50 ok; ";
    }
    return pass(d.str() + "N in {1,3,5}");
}

// 5. Template bytes, verbatim question, budget.
Result prompt_fidelity() {
    const auto golden = test::read_file(test::golden_dir() / "default_template.txt");
    if (golden.empty()) return fail("golden file missing");
    const auto tmpl = default_template();
    if (tmpl.body != golden) return fail("default template differs from golden file");

    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto msg = test::random_words(rng, 1, 20) + " \"quoted\" {braces} \xC3\xBC";
        const auto p = compose_prompt(tmpl, "Title: X", msg);
        if (p.serialize().find(msg) == std::string::npos) return fail("message not verbatim: " + msg);
    }

    const auto detailed = load_template_dir(test::fixture_dir() / "templates").at("detailed");
    std::uniform_int_distribution<std::size_t> hit_count(0, 40), desc_len(0, 6000);
    std::uniform_real_distribution<double> score(-1.0, 1.0);
    for (int round = 0; round < 1000; ++round) {
        std::vector<Course> courses;
        std::vector<SearchHit> hits;
        const auto n = hit_count(rng);
        for (std::size_t i = 0; i < n; ++i) {
            Course c;
            c.id = static_cast<CourseId>(i);
            c.name = "Course " + std::to_string(i);
            c.url = "https://example.org/" + std::to_string(i);
            c.rating = 4.5;
            c.description = std::string(desc_len(rng), 'x');
            courses.push_back(std::move(c));
            hits.push_back({static_cast<CourseId>(i), score(rng)});
        }
        std::sort(hits.begin(), hits.end(), hit_before);
        const Catalog catalog(std::move(courses), "synthetic");
        const auto& t = round % 2 ? detailed : tmpl;
        const auto composed = compose_prompt(t, render_context(hits, catalog, t.detail_fields), "recommend courses");
        const auto fitted = fit_to_budget(composed, hits, catalog, t, kDefaultTokenBudget);
        if (fitted.prompt.estimated_tokens > kDefaultTokenBudget) {
            return fail("round " + std::to_string(round) + " exceeded the budget");
        }
        if (fitted.prompt.estimated_tokens != estimate_tokens(fitted.prompt.serialize())) {
            return fail("round " + std::to_string(round) + " token estimate is stale");
        }
    }
    return pass("golden template byte-identical; 200 verbatim checks; 1000 budget rounds <= 4096 tokens");
}

// 6. Search latency at catalog scale, and the comparison table.
Result desk_scale_latency() {
    constexpr std::size_t kRows = 3342, kDim = 1536;
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss;
    auto random_unit = [&] {
        std::vector<double> v(kDim);
        double sq = 0.0;
        for (auto& x : v) {
            x = gauss(rng);
            sq += x * x;
        }
        for (auto& x : v) x /= std::sqrt(sq);
        return EmbeddingVector(std::move(v));
    };
    VectorIndex index(kDim, "synthetic", "synthetic");
    for (std::size_t r = 0; r < kRows; ++r) index.add(static_cast<CourseId>(r), random_unit());

    std::vector<double> ms;
    for (int i = 0; i < 55; ++i) {
        const auto q = random_unit();
        const auto t = Steady::now();
        const auto hits = index.search(q, 8);
        const double elapsed = std::chrono::duration<double, std::milli>(Steady::now() - t).count();
        if (hits.size() != 8) return fail("search returned " + std::to_string(hits.size()) + " hits");
        if (i >= 5) ms.push_back(elapsed);  // first five are warm-up
    }
    const double med = median(ms);

    auto p = test::fixture_pipeline();
    const auto model = build_tfidf(p.recommender->catalog());
    std::vector<std::string> queries;
    std::istringstream in(test::read_file(test::fixture_dir() / "queries.txt"));
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) queries.push_back(line);
    }
    const auto report = compare_latency(queries, *p.recommender, model, 10);
    std::ostringstream table;
    report.write_table(table);
    std::cout << table.str();
    if (report.rows.size() != queries.size() || table.str().find("baseline_ms") == std::string::npos) {
        return fail("comparison table malformed");
    }

    std::ostringstream d;
    d << "median search " << med << " ms over " << kRows << "x" << kDim << " (limit 50 ms)";
    if (report.median_delta_ms) d << "; baseline-minus-RAG median " << *report.median_delta_ms << " ms (reported only)";
    return med < 50.0 ? pass(d.str()) : fail(d.str());
}

// 7. Persistence.
Result round_trip_persistence() {
    const auto index = test::fixture_index();
    std::stringstream buf;
    save_index(*index, buf);
    const auto bytes = buf.str();
    std::istringstream in(bytes);
    const auto loaded = load_index(in);
    if (loaded.size() != index->size() || loaded.dim() != index->dim() ||
        loaded.embedder_name() != index->embedder_name() ||
        loaded.catalog_fingerprint() != index->catalog_fingerprint()) {
        return fail("header fields changed");
    }
    for (std::size_t r = 0; r < index->size(); ++r) {
        const auto a = index->row(r), b = loaded.row(r);
        if (loaded.id_at(r) != index->id_at(r) || !std::equal(a.begin(), a.end(), b.begin())) {
            return fail("row " + std::to_string(r) + " changed");
        }
    }

    auto expect = [](const std::string& data, ErrorKind want) {
        std::istringstream s(data);
        bool threw = false;
        const auto kind = kind_of([&] { load_index(s); }, threw);
        return threw && kind == want;
    };
    std::string flipped = bytes;
    flipped[bytes.size() - 3] = static_cast<char>(flipped[bytes.size() - 3] ^ 0x10);
    if (!expect(flipped, ErrorKind::CorruptIndex)) return fail("flipped payload byte accepted");
    if (!expect(bytes.substr(0, bytes.size() - 7), ErrorKind::CorruptIndex)) return fail("truncated file accepted");
    std::string versioned = bytes;
    versioned[8] = static_cast<char>(VectorIndex::kFormatVersion + 1);
    if (!expect(versioned, ErrorKind::FormatVersionMismatch)) return fail("version mismatch not detected");
    return pass("bit-identical round trip; corrupt, truncated and version-mismatched files rejected");
}

}  // namespace

int main() {
    const std::pair<const char*, Result (*)()> criteria[] = {
        {"dataset ingestion", dataset_ingestion},   {"retrieval oracle equivalence", retrieval_oracle},
        {"cold-start contrast", cold_start},         {"count conformance", count_conformance},
        {"prompt fidelity", prompt_fidelity},        {"desk-scale latency", desk_scale_latency},
        {"round-trip persistence", round_trip_persistence},
    };
    int failures = 0;
    int n = 0;
    for (const auto& [name, run] : criteria) {
        ++n;
        Result r;
        try {
            r = run();
        } catch (const std::exception& e) {
            r = fail(std::string("exception: ") + e.what());
        }
        const char* tag = r.outcome == Outcome::Pass ? "PASS" : r.outcome == Outcome::Fail ? "FAIL" : "SKIP";
        if (r.outcome == Outcome::Fail) ++failures;
        std::cout << tag << " " << n << " " << name << ": " << r.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
