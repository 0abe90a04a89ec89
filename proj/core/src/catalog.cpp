// SPDX-License-Identifier: Apache-2.0
#include "ramo/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>
#include <unordered_set>

#include "ramo/csv.hpp"
#include "ramo/error.hpp"
#include "ramo/hash.hpp"
#include "ramo/text.hpp"

namespace ramo {

std::string_view to_string(Difficulty d) noexcept {
    switch (d) {
        case Difficulty::Beginner: return "Beginner";
        case Difficulty::Intermediate: return "Intermediate";
        case Difficulty::Advanced: return "Advanced";
        case Difficulty::Conversant: return "Conversant";
        case Difficulty::Unrated: return "Unrated";
    }
    return "Unrated";
}

Catalog::Catalog(std::vector<Course> courses, std::string source_fingerprint)
    : courses_(std::move(courses)), fingerprint_(std::move(source_fingerprint)) {}

const Course* Catalog::find(CourseId id) const noexcept {
    // ids are assigned densely in load order, so try the direct slot first.
    if (id >= 0 && static_cast<std::size_t>(id) < courses_.size() &&
        courses_[static_cast<std::size_t>(id)].id == id) {
        return &courses_[static_cast<std::size_t>(id)];
    }
    auto it = std::find_if(courses_.begin(), courses_.end(),
                           [id](const Course& c) { return c.id == id; });
    return it == courses_.end() ? nullptr : &*it;
}

std::optional<double> parse_rating(std::string_view raw) {
    const auto text = trim(raw);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::fixed);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    if (value < 0.0 || value > 5.0) return std::nullopt;
    return value;
}

std::string format_rating(double rating) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, rating);
    std::string out(buf, ptr);
    if (out.find_first_of(".e") == std::string::npos) out += ".0";
    return out;
}

Difficulty parse_difficulty(std::string_view raw) {
    const auto key = normalize_key(raw);
    if (key == "beginner") return Difficulty::Beginner;
    if (key == "intermediate") return Difficulty::Intermediate;
    if (key == "advanced") return Difficulty::Advanced;
    if (key == "conversant") return Difficulty::Conversant;
    return Difficulty::Unrated;
}

std::vector<std::string> split_skills(std::string_view raw) {
    std::vector<std::string> pieces;
    bool delimited = false;
    std::size_t start = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t end) {
        pieces.emplace_back(raw.substr(start, end - start));
    };
    while (i < raw.size()) {
        const char c = raw[i];
        if (c == ',') {
            flush(i);
            delimited = true;
            start = ++i;
            continue;
        }
        if (c == ' ' || c == '\t') {
            std::size_t j = i;
            while (j < raw.size() && (raw[j] == ' ' || raw[j] == '\t')) ++j;
            if (j - i >= 2) {
                flush(i);
                delimited = true;
                start = j;
            }
            i = j;
            continue;
        }
        ++i;
    }
    flush(raw.size());

    std::vector<std::string> skills;
    if (!delimited) {
        auto whole = clean_text(raw);
        if (!whole.empty()) skills.push_back(std::move(whole));
        return skills;
    }
    for (const auto& piece : pieces) {
        auto cleaned = clean_text(piece);
        if (!cleaned.empty()) skills.push_back(std::move(cleaned));
    }
    return skills;
}

namespace {

struct ColumnIndex {
    std::size_t name, university, difficulty, rating, url, description, skills;
};

std::size_t find_column(const std::vector<std::string>& header, const std::string& wanted) {
    const auto key = normalize_key(wanted);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (normalize_key(header[i]) == key) return i;
    }
    throw Error(ErrorKind::MissingColumn, wanted);
}

std::string fingerprint_of(const std::vector<Course>& courses) {
    std::uint64_t h = kFnvOffsetBasis;
    auto feed = [&h](std::string_view s) {
        h = fnv1a64(s, h);
        h = fnv1a64(std::string_view("\x1f", 1), h);
    };
    for (const auto& c : courses) {
        feed(c.name);
        feed(c.university);
        feed(to_string(c.difficulty));
        feed(c.rating ? format_rating(*c.rating) : std::string{});
        feed(c.url);
        feed(c.description);
        for (const auto& s : c.skills) feed(s);
        h = fnv1a64(std::string_view("\x1e", 1), h);
    }
    return to_hex(h);
}

}  // namespace

Catalog load_catalog(std::istream& source, const HeaderMap& headers, LoadStats* stats) {
    csv::Reader reader(source);
    auto header = reader.next();
    if (!header) throw Error(ErrorKind::MissingColumn, headers.name + " (no header row)");

    const ColumnIndex col{
        find_column(header->fields, headers.name),
        find_column(header->fields, headers.university),
        find_column(header->fields, headers.difficulty),
        find_column(header->fields, headers.rating),
        find_column(header->fields, headers.url),
        find_column(header->fields, headers.description),
        find_column(header->fields, headers.skills),
    };
    const std::size_t width = header->fields.size();

    std::vector<Course> courses;
    std::unordered_set<std::string> seen;
    std::size_t rows = 0;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue;  // blank line
        if (rec->fields.size() != width) {
            throw Error(ErrorKind::MalformedCsv,
                        "line " + std::to_string(rec->line) + ": expected " +
                            std::to_string(width) + " fields, got " +
                            std::to_string(rec->fields.size()));
        }
        ++rows;
        const auto& f = rec->fields;
        Course c;
        c.name = clean_text(f[col.name]);
        if (c.name.empty()) continue;
        c.university = clean_text(f[col.university]);
        c.difficulty = parse_difficulty(f[col.difficulty]);
        c.rating = parse_rating(clean_text(f[col.rating]));
        c.url = clean_text(f[col.url]);
        c.description = clean_text(f[col.description]);
        c.skills = split_skills(f[col.skills]);

        std::string key = ascii_lower(c.name);
        key += '\x1f';
        key += ascii_lower(c.university);
        key += '\x1f';
        key += ascii_lower(c.description);
        if (!seen.insert(std::move(key)).second) continue;

        c.id = static_cast<CourseId>(courses.size());
        courses.push_back(std::move(c));
    }

    if (stats) {
        stats->rows = rows;
        stats->retained = courses.size();
    }
    if (courses.empty()) throw Error(ErrorKind::EmptyCatalog, "no rows survived cleaning");
    auto fp = fingerprint_of(courses);
    return Catalog(std::move(courses), std::move(fp));
}

Catalog load_catalog_file(const std::string& path, const HeaderMap& headers, LoadStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    return load_catalog(in, headers, stats);
}

void write_catalog_csv(const Catalog& catalog, std::ostream& sink, const HeaderMap& headers) {
    const std::string_view names[] = {headers.name,   headers.university,  headers.difficulty,
                                      headers.rating, headers.url,         headers.description,
                                      headers.skills};
    for (std::size_t i = 0; i < std::size(names); ++i) {
        if (i) sink << ',';
        sink << csv::escape_field(names[i]);
    }
    sink << '\n';
    for (const auto& c : catalog.courses()) {
        std::string skills;
        for (std::size_t i = 0; i < c.skills.size(); ++i) {
            if (i) skills += ", ";
            skills += c.skills[i];
        }
        sink << csv::escape_field(c.name) << ',' << csv::escape_field(c.university) << ','
             << to_string(c.difficulty) << ',' << (c.rating ? format_rating(*c.rating) : "")
             << ',' << csv::escape_field(c.url) << ',' << csv::escape_field(c.description) << ','
             << csv::escape_field(skills) << '\n';
    }
}

std::vector<Course> top_rated(const Catalog& catalog, std::size_t k) {
    std::vector<const Course*> order;
    order.reserve(catalog.size());
    for (const auto& c : catalog.courses()) order.push_back(&c);
    auto key = [](const Course* c) {
        // rating desc with absent last, then difficulty asc, name asc, id asc
        return std::make_tuple(c->rating.has_value() ? 0 : 1, -c->rating.value_or(0.0),
                               static_cast<int>(c->difficulty), std::string_view(c->name), c->id);
    };
    std::sort(order.begin(), order.end(),
              [&](const Course* a, const Course* b) { return key(a) < key(b); });
    const auto n = std::min(k, order.size());
    std::vector<Course> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(*order[i]);
    return out;
}

}  // namespace ramo
