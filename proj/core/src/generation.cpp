// SPDX-License-Identifier: Apache-2.0
#include "ramo/generation.hpp"

#include <algorithm>
#include <cctype>

#include "ramo/error.hpp"
#include "ramo/text.hpp"

namespace ramo {

std::optional<std::string> ContextBlock::get(std::string_view label) const {
    for (const auto& [k, v] : fields) {
        if (k == label) return v;
    }
    return std::nullopt;
}

std::vector<ContextBlock> parse_context_blocks(std::string_view context) {
    std::vector<ContextBlock> blocks;
    ContextBlock current;
    for (const auto& raw : split_lines(context)) {
        const auto line = trim(raw);
        if (line.empty()) {
            if (!current.fields.empty()) blocks.push_back(std::move(current));
            current = {};
            continue;
        }
        const auto sep = line.find(": ");
        if (sep == std::string_view::npos || sep == 0) {
            if (!current.fields.empty()) {
                current.fields.back().second.append(" ").append(line);
            }
            continue;
        }
        current.fields.emplace_back(std::string(line.substr(0, sep)),
                                    std::string(line.substr(sep + 2)));
    }
    if (!current.fields.empty()) blocks.push_back(std::move(current));
    return blocks;
}

std::string scripted_generate(const ComposedPrompt& prompt) {
    std::vector<ContextBlock> titled;
    for (auto& b : parse_context_blocks(prompt.context_part)) {
        if (b.get("Title")) titled.push_back(std::move(b));
    }
    if (titled.empty()) return std::string(kDontKnowReply);

    const auto cap = prompt.requested_count ? static_cast<std::size_t>(*prompt.requested_count)
                                            : kScriptedDefaultCap;
    const auto n = std::min(cap, titled.size());

    std::string reply(kScriptedPreamble);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = titled[i];
        reply += '\n';
        reply += std::to_string(i + 1) + ". " + *b.get("Title");
        if (auto url = b.get("URL")) reply += "\n   URL: " + *url;
        if (auto rating = b.get("Rating")) reply += "\n   Rating: " + *rating;
    }
    return reply;
}

std::string ScriptedGenerator::generate(const ComposedPrompt& prompt, const RequestContext&) const {
    ++calls_;
    return scripted_generate(prompt);
}

namespace {

constexpr std::size_t kMinSubstringKey = 3;

// Returns the item text when `line` starts with "1." / "1)" / "-" / "*" / "•".
std::optional<std::string_view> item_text(std::string_view line) {
    line = trim(line);
    std::size_t i = 0;
    if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::nullopt;
        ++i;
    } else if (line.starts_with("- ") || line.starts_with("* ")) {
        i = 1;
    } else if (line.starts_with("•")) {
        i = std::string_view("•").size();
    } else {
        return std::nullopt;
    }
    if (i >= line.size() || (line[i] != ' ' && line[i] != '\t')) return std::nullopt;
    auto rest = trim(line.substr(i));
    if (rest.empty()) return std::nullopt;
    return rest;
}

std::optional<std::string> find_url(std::string_view text) {
    for (std::string_view scheme : {"https://", "http://"}) {
        const auto pos = text.find(scheme);
        if (pos == std::string_view::npos) continue;
        auto end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) &&
               text[end] != ')' && text[end] != '>' && text[end] != ']') {
            ++end;
        }
        auto url = text.substr(pos, end - pos);
        while (!url.empty() && (url.back() == '.' || url.back() == ',')) url.remove_suffix(1);
        return std::string(url);
    }
    return std::nullopt;
}

std::string strip_decorations(std::string_view text) {
    std::string s(text);
    for (std::string_view mark : {"**", "__", "`"}) {
        for (auto pos = s.find(mark); pos != std::string::npos; pos = s.find(mark)) {
            s.erase(pos, mark.size());
        }
    }
    std::string_view v = trim(s);
    if (v.starts_with("Title:")) v = trim(v.substr(6));
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
        v = v.substr(1, v.size() - 2);
    }
    return std::string(trim(v));
}

bool starts_with_label(std::string_view line, std::string_view label) {
    return ascii_lower(line.substr(0, label.size())) == label;
}

}  // namespace

std::optional<CourseId> exact_title(std::string_view title, const Catalog& catalog) {
    const auto key = normalize_key(title);
    if (key.empty()) return std::nullopt;
    for (const auto& c : catalog.courses()) {
        if (normalize_key(c.name) == key) return c.id;
    }
    return std::nullopt;
}

std::optional<CourseId> match_title(std::string_view title, const Catalog& catalog) {
    if (auto id = exact_title(title, catalog)) return id;
    const auto key = normalize_key(title);
    if (key.size() < kMinSubstringKey) return std::nullopt;
    std::optional<CourseId> found;
    for (const auto& c : catalog.courses()) {
        const auto name = normalize_key(c.name);
        if (name.size() < kMinSubstringKey) continue;
        if (name.find(key) != std::string::npos || key.find(name) != std::string::npos) {
            if (found) return std::nullopt;  // ambiguous
            found = c.id;
        }
    }
    return found;
}

std::vector<ParsedRecommendation> parse_recommendations(std::string_view reply,
                                                        const Catalog& catalog) {
    std::vector<ParsedRecommendation> out;
    bool attached = false;  // following detail lines belong to out.back()
    for (const auto& raw : split_lines(reply)) {
        if (auto item = item_text(raw)) {
            ParsedRecommendation rec;
            std::string text = strip_decorations(*item);
            rec.url = find_url(text);
            if (rec.url) {
                auto pos = text.find(*rec.url);
                text.erase(pos, rec.url->size());
                text = strip_decorations(clean_text(text));
                while (!text.empty() && (text.back() == '(' || text.back() == '-' ||
                                         text.back() == ':' || text.back() == ' ')) {
                    text.pop_back();
                }
            }
            rec.title_text = text;
            rec.course_id = exact_title(text, catalog);
            if (!rec.course_id) {
                for (std::string_view sep : {" - ", " – ", " — ", ": "}) {
                    const auto pos = text.find(sep);
                    if (pos == std::string::npos || pos == 0) continue;
                    auto head = std::string(trim(std::string_view(text).substr(0, pos)));
                    if (auto id = match_title(head, catalog)) {
                        rec.course_id = id;
                        rec.reason = std::string(trim(std::string_view(text).substr(pos + sep.size())));
                        rec.title_text = std::move(head);
                        break;
                    }
                }
            }
            if (!rec.course_id) rec.course_id = match_title(text, catalog);
            if (rec.title_text.empty()) {
                attached = false;
                continue;
            }
            out.push_back(std::move(rec));
            attached = true;
            continue;
        }
        const auto line = trim(raw);
        if (line.empty()) continue;
        const bool indented = !raw.empty() && (raw.front() == ' ' || raw.front() == '\t');
        const bool detail = starts_with_label(line, "url:") || starts_with_label(line, "link:") ||
                            starts_with_label(line, "reason:") || starts_with_label(line, "rating:");
        if (!attached || (!indented && !detail)) {
            attached = false;
            continue;
        }
        auto& rec = out.back();
        if (!rec.url) rec.url = find_url(line);
        if (starts_with_label(line, "reason:") && !rec.reason) {
            rec.reason = std::string(trim(line.substr(7)));
        }
    }
    return out;
}

}  // namespace ramo
