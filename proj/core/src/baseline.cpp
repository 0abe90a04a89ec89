// SPDX-License-Identifier: Apache-2.0
#include "ramo/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ramo/csv.hpp"
#include "ramo/error.hpp"

namespace ramo {

std::vector<std::string> tfidf_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2) tokens.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z') {
            cur.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            cur.push_back(ch);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

namespace {

std::string course_text(const Course& c) {
    std::string text = c.name;
    for (const auto& s : c.skills) text.append(" ").append(s);
    text.append(" ").append(c.description);
    return text;
}

// Term counts keyed by vocabulary index; unknown terms are skipped.
std::map<std::uint32_t, double> term_counts(const std::vector<std::string>& tokens,
                                            const std::map<std::string, std::uint32_t>& vocab) {
    std::map<std::uint32_t, double> tf;
    for (const auto& t : tokens) {
        if (auto it = vocab.find(t); it != vocab.end()) tf[it->second] += 1.0;
    }
    return tf;
}

SparseVector weigh_and_normalize(const std::map<std::uint32_t, double>& tf,
                                 const std::vector<double>& idf) {
    SparseVector v;
    v.reserve(tf.size());
    double sq = 0.0;
    for (const auto& [term, count] : tf) {
        const double w = count * idf[term];
        v.emplace_back(term, w);
        sq += w * w;
    }
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (auto& [term, w] : v) w *= inv;
    }
    return v;
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            s += i->second * j->second;
            ++i, ++j;
        }
    }
    return s;
}

}  // namespace

SparseVector TfidfModel::vectorize(std::string_view text) const {
    return weigh_and_normalize(term_counts(tfidf_tokenize(text), vocabulary), idf);
}

TfidfModel build_tfidf(const Catalog& catalog) {
    if (catalog.empty()) throw Error(ErrorKind::EmptyCatalog, "cannot build TF-IDF on an empty catalog");
    TfidfModel model;
    model.catalog_fingerprint = catalog.fingerprint();

    std::vector<std::vector<std::string>> docs;
    docs.reserve(catalog.size());
    std::map<std::string, std::size_t> df;
    for (const auto& c : catalog.courses()) {
        docs.push_back(tfidf_tokenize(course_text(c)));
        auto unique = docs.back();
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        for (const auto& t : unique) ++df[t];
    }

    // std::map iteration gives a sorted, reproducible vocabulary.
    const double n = static_cast<double>(catalog.size());
    model.idf.reserve(df.size());
    for (const auto& [term, count] : df) {
        model.vocabulary.emplace(term, static_cast<std::uint32_t>(model.idf.size()));
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        model.doc_ids.push_back(catalog.courses()[i].id);
        model.doc_vectors.push_back(weigh_and_normalize(term_counts(docs[i], model.vocabulary), model.idf));
    }
    return model;
}

std::vector<SearchHit> baseline_recommend(const TfidfModel& model, std::string_view query,
                                          std::size_t k, double min_similarity) {
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
    const auto q = model.vectorize(query);
    if (q.empty()) throw Error(ErrorKind::NoMatch, "query shares no terms with the catalog");

    std::vector<SearchHit> hits;
    for (std::size_t i = 0; i < model.doc_vectors.size(); ++i) {
        const double s = sparse_dot(q, model.doc_vectors[i]);
        if (s >= min_similarity) hits.push_back({model.doc_ids[i], s});
    }
    if (hits.empty()) {
        throw Error(ErrorKind::NoMatch, "no course reaches the similarity threshold");
    }
    std::sort(hits.begin(), hits.end(), hit_before);
    if (hits.size() > k) hits.resize(k);
    return hits;
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorKind::InvalidArgument, "median of nothing");
    std::sort(values.begin(), values.end());
    const auto mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::optional<double> LatencyRow::delta_ms() const {
    if (!rag_ms || !baseline_ms) return std::nullopt;
    return *baseline_ms - *rag_ms;
}

namespace {

std::string fmt_ms(const std::optional<double>& v, const std::string& error = {}) {
    if (!v) return error.empty() ? "-" : error;
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << *v;
    return ss.str();
}

}  // namespace

void LatencyReport::write_table(std::ostream& out) const {
    std::size_t qw = 5;
    for (const auto& r : rows) qw = std::max(qw, r.query.size());
    qw = std::min<std::size_t>(qw, 60);
    auto cell = [&out](const std::string& s, std::size_t w) { out << std::setw(static_cast<int>(w)) << s; };
    out << std::left;
    cell("query", qw);
    out << std::right;
    out << "  ";
    cell("rag_ms", 12);
    cell("embed_ms", 12);
    cell("search_ms", 12);
    cell("gen_ms", 12);
    cell("baseline_ms", 14);
    cell("delta_ms", 12);
    out << '\n';
    for (const auto& r : rows) {
        auto q = r.query.size() > qw ? r.query.substr(0, qw - 3) + "..." : r.query;
        out << std::left;
        cell(q, qw);
        out << std::right << "  ";
        cell(fmt_ms(r.rag_ms, r.rag_error), 12);
        cell(fmt_ms(r.embed_ms), 12);
        cell(fmt_ms(r.search_ms), 12);
        cell(fmt_ms(r.generate_ms), 12);
        cell(fmt_ms(r.baseline_ms, r.baseline_error), 14);
        cell(fmt_ms(r.delta_ms()), 12);
        out << '\n';
    }
    out << std::left;
    cell("median", qw);
    out << std::right << "  ";
    cell(fmt_ms(median_rag_ms), 12);
    cell("", 36);
    cell(fmt_ms(median_baseline_ms), 14);
    cell(fmt_ms(median_delta_ms), 12);
    out << '\n' << "repetitions: " << repetitions << '\n';
}

void LatencyReport::write_csv(std::ostream& out) const {
    out << "query,rag_ms,embed_ms,search_ms,generate_ms,baseline_ms,delta_ms\n";
    for (const auto& r : rows) {
        out << csv::escape_field(r.query) << ',' << fmt_ms(r.rag_ms, r.rag_error) << ','
            << fmt_ms(r.embed_ms) << ',' << fmt_ms(r.search_ms) << ',' << fmt_ms(r.generate_ms)
            << ',' << fmt_ms(r.baseline_ms, r.baseline_error) << ',' << fmt_ms(r.delta_ms())
            << '\n';
    }
    out << "median," << fmt_ms(median_rag_ms) << ",,,," << fmt_ms(median_baseline_ms) << ','
        << fmt_ms(median_delta_ms) << '\n';
}

LatencyReport compare_latency(std::span<const std::string> queries, const Recommender& rag,
                              const TfidfModel& baseline, std::size_t repetitions, std::size_t k) {
    if (repetitions < 3) throw Error(ErrorKind::InvalidArgument, "repetitions must be at least 3");
    using Steady = std::chrono::steady_clock;

    LatencyReport report;
    report.repetitions = repetitions;
    std::vector<double> rag_medians, base_medians, deltas;

    for (const auto& query : queries) {
        LatencyRow row;
        row.query = query;
        std::vector<double> total, embed, search, gen, base;
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            if (row.rag_error.empty()) {
                try {
                    ChatSession session("bench");
                    const auto resp = rag.recommend(session, query);
                    total.push_back(resp.latency.total_ms);
                    embed.push_back(resp.latency.embed_ms);
                    search.push_back(resp.latency.search_ms);
                    gen.push_back(resp.latency.generate_ms);
                } catch (const Error& e) {
                    row.rag_error = std::string(to_string(e.kind()));
                }
            }
            if (row.baseline_error.empty()) {
                const auto start = Steady::now();
                try {
                    (void)baseline_recommend(baseline, query, k);
                    base.push_back(
                        std::chrono::duration<double, std::milli>(Steady::now() - start).count());
                } catch (const Error& e) {
                    row.baseline_error = std::string(to_string(e.kind()));
                }
            }
        }
        if (row.rag_error.empty()) {
            row.rag_ms = median(total);
            row.embed_ms = median(embed);
            row.search_ms = median(search);
            row.generate_ms = median(gen);
            rag_medians.push_back(*row.rag_ms);
        }
        if (row.baseline_error.empty()) {
            row.baseline_ms = median(base);
            base_medians.push_back(*row.baseline_ms);
        }
        if (auto d = row.delta_ms()) deltas.push_back(*d);
        report.rows.push_back(std::move(row));
    }
    if (!rag_medians.empty()) report.median_rag_ms = median(rag_medians);
    if (!base_medians.empty()) report.median_baseline_ms = median(base_medians);
    if (!deltas.empty()) report.median_delta_ms = median(deltas);
    return report;
}

}  // namespace ramo
