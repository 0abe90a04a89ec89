// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ramo {

using CourseId = std::int64_t;

/// Declared order is the "easiest first" order used for defaults.
enum class Difficulty : std::uint8_t { Beginner, Intermediate, Advanced, Conversant, Unrated };

std::string_view to_string(Difficulty d) noexcept;

struct Course {
    CourseId id = 0;
    std::string name;
    std::string university;
    Difficulty difficulty = Difficulty::Unrated;
    std::optional<double> rating;
    std::string url;
    std::string description;
    std::vector<std::string> skills;

    friend bool operator==(const Course&, const Course&) = default;
};

/// Header names for the seven logical columns.
struct HeaderMap {
    std::string name = "Course Name";
    std::string university = "University";
    std::string difficulty = "Difficulty Level";
    std::string rating = "Course Rating";
    std::string url = "Course URL";
    std::string description = "Course Description";
    std::string skills = "Skills";
};

struct LoadStats {
    std::size_t rows = 0;       // data records read
    std::size_t retained = 0;   // after dedupe
};

/// Immutable once loaded; share via const reference or shared_ptr<const>.
class Catalog {
public:
    Catalog(std::vector<Course> courses, std::string source_fingerprint);

    const std::vector<Course>& courses() const noexcept { return courses_; }
    const std::string& fingerprint() const noexcept { return fingerprint_; }
    std::size_t size() const noexcept { return courses_.size(); }
    bool empty() const noexcept { return courses_.empty(); }

    /// nullptr when the id is unknown.
    const Course* find(CourseId id) const noexcept;

private:
    std::vector<Course> courses_;
    std::string fingerprint_;
};

std::optional<double> parse_rating(std::string_view raw);

/// Shortest text that parses back to the same value; "4.0" rather than "4".
std::string format_rating(double rating);

Difficulty parse_difficulty(std::string_view raw);

/// Splits a raw skills cell on commas and runs of two or more spaces. When
/// neither delimiter is present the whole (cleaned) cell is one skill.
std::vector<std::string> split_skills(std::string_view raw);

/// Throws Error{MissingColumn|EmptyCatalog|MalformedCsv}.
Catalog load_catalog(std::istream& source, const HeaderMap& headers = {},
                     LoadStats* stats = nullptr);
Catalog load_catalog_file(const std::string& path, const HeaderMap& headers = {},
                          LoadStats* stats = nullptr);

/// Writes the catalog back as CSV with the given header names. Reloading the
/// output yields the same courses.
void write_catalog_csv(const Catalog& catalog, std::ostream& sink,
                       const HeaderMap& headers = {});

/// Rating desc (absent last), then difficulty asc, then name asc.
std::vector<Course> top_rated(const Catalog& catalog, std::size_t k);

}  // namespace ramo
