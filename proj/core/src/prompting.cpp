// SPDX-License-Identifier: Apache-2.0
#include "ramo/prompting.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include "ramo/error.hpp"
#include "ramo/text.hpp"

namespace ramo {

DetailFields::DetailFields(std::initializer_list<DetailField> fields) {
    for (auto f : fields) insert(f);
}

DetailFields parse_detail_fields(std::string_view text) {
    DetailFields out;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        const auto t = ascii_lower(token);
        if (t == "title") out.insert(DetailField::Title);
        else if (t == "url") out.insert(DetailField::Url);
        else if (t == "rating") out.insert(DetailField::Rating);
        else if (t == "difficulty") out.insert(DetailField::Difficulty);
        else if (t == "reason" || t == "description") out.insert(DetailField::Reason);
        else throw Error(ErrorKind::InvalidTemplate, "unknown detail field '" + token + "'");
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t' || c == '[' || c == ']') flush();
        else token.push_back(c);
    }
    flush();
    if (out.empty()) throw Error(ErrorKind::InvalidTemplate, "detail_fields is empty");
    return out;
}

void PromptTemplate::validate() const {
    auto count = [this](std::string_view needle) {
        std::size_t n = 0;
        for (auto pos = body.find(needle); pos != std::string::npos;
             pos = body.find(needle, pos + needle.size())) {
            ++n;
        }
        return n;
    };
    if (count(kContextPlaceholder) != 1 || count(kQuestionPlaceholder) != 1) {
        throw Error(ErrorKind::InvalidTemplate,
                    "template '" + id + "' must contain {context} and {question} exactly once");
    }
    if (body.find(kContextPlaceholder) > body.find(kQuestionPlaceholder)) {
        throw Error(ErrorKind::InvalidTemplate,
                    "template '" + id + "' must place {context} before {question}");
    }
    if (requested_count && *requested_count < 1) {
        throw Error(ErrorKind::InvalidTemplate, "requested_count must be at least 1");
    }
    if (detail_fields.empty()) throw Error(ErrorKind::InvalidTemplate, "detail_fields is empty");
}

std::optional<int> parse_requested_count(std::string_view text) {
    static const std::regex pattern(
        R"(recommend\s+(?:me\s+)?(\d+|one|two|three|four|five|six|seven|eight|nine|ten)\s+(?:[a-z+#-]+\s+)?courses?\b)",
        std::regex::icase);
    static constexpr std::array<std::string_view, 10> kWords{
        "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};

    const std::string s(text);
    std::smatch m;
    if (!std::regex_search(s, m, pattern)) return std::nullopt;
    const auto word = ascii_lower(m[1].str());
    for (std::size_t i = 0; i < kWords.size(); ++i) {
        if (word == kWords[i]) return static_cast<int>(i + 1);
    }
    int n = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), n);
    if (ec != std::errc{} || n < 1) return std::nullopt;
    return n;
}

PromptTemplate make_template(std::string id, std::string body, DetailFields fields) {
    PromptTemplate t;
    t.id = std::move(id);
    t.requested_count = parse_requested_count(body);
    t.body = std::move(body);
    t.detail_fields = fields;
    t.validate();
    return t;
}

PromptTemplate default_template() {
    static const std::string kBody =
        "You are a fantastic Coursera course recommender. Use the following pieces of context "
        "to answer the question and recommend relevant courses to the user.\n"
        "If the user doesn't specify their requirements, you can just recommend some courses "
        "that are most popular in the system based on their ratings and difficulty levels. "
        "You only need to provide the course title to the user.\n"
        "Also, please pay attention to how many courses the user wants you to recommend.\n"
        "If you don't know the answer, just say \"I don't know\".\n"
        "\n"
        "Context:\n"
        "{context}\n"
        "\n"
        "User Question:\n"
        "{question}\n";
    PromptTemplate t;
    t.id = "default";
    t.body = kBody;
    t.detail_fields = {DetailField::Title};
    return t;
}

PromptTemplate parse_template_file(std::string_view contents, std::string fallback_id) {
    PromptTemplate t;
    t.id = std::move(fallback_id);
    std::optional<int> count_override;
    bool fields_set = false;

    std::string_view body = contents;
    auto first_line_end = contents.find('\n');
    if (trim(contents.substr(0, first_line_end)) == "---") {
        std::size_t pos = first_line_end == std::string_view::npos ? contents.size()
                                                                   : first_line_end + 1;
        bool closed = false;
        while (pos < contents.size()) {
            auto end = contents.find('\n', pos);
            if (end == std::string_view::npos) end = contents.size();
            const auto line = trim(contents.substr(pos, end - pos));
            pos = std::min(end + 1, contents.size());
            if (line == "---") {
                closed = true;
                break;
            }
            if (line.empty() || line.front() == '#') continue;
            const auto colon = line.find(':');
            if (colon == std::string_view::npos) {
                throw Error(ErrorKind::InvalidTemplate, "bad front matter line: " + std::string(line));
            }
            const auto key = ascii_lower(trim(line.substr(0, colon)));
            const auto value = trim(line.substr(colon + 1));
            if (key == "id") {
                t.id = std::string(value);
            } else if (key == "detail_fields") {
                t.detail_fields = parse_detail_fields(value);
                fields_set = true;
            } else if (key == "requested_count") {
                int n = 0;
                auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
                if (ec != std::errc{} || ptr != value.data() + value.size() || n < 1) {
                    throw Error(ErrorKind::InvalidTemplate, "requested_count must be a positive integer");
                }
                count_override = n;
            } else {
                throw Error(ErrorKind::InvalidTemplate, "unknown front matter key: " + key);
            }
        }
        if (!closed) throw Error(ErrorKind::InvalidTemplate, "unterminated front matter");
        body = contents.substr(pos);
    }
    t.body = std::string(body);
    if (!fields_set) t.detail_fields = {DetailField::Title};
    t.requested_count = count_override ? count_override : parse_requested_count(t.body);
    t.validate();
    return t;
}

PromptTemplate load_template_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_template_file(ss.str(), path.stem().string());
}

std::map<std::string, PromptTemplate> load_template_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw Error(ErrorKind::Io, "not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".txt" || ext == ".tmpl")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, PromptTemplate> out;
    for (const auto& f : files) {
        auto t = load_template_file(f);
        auto id = t.id;
        if (!out.emplace(id, std::move(t)).second) {
            throw Error(ErrorKind::InvalidTemplate, "duplicate template id '" + id + "'");
        }
    }
    return out;
}

std::optional<PromptOrder> parse_prompt_order(std::string_view text) {
    const auto t = ascii_lower(trim(text));
    if (t == "template_context_question" || t == "template-first" || t == "table") {
        return PromptOrder::TemplateContextQuestion;
    }
    if (t == "question_template_context" || t == "question-first" || t == "prose") {
        return PromptOrder::QuestionTemplateContext;
    }
    return std::nullopt;
}

std::string_view to_string(PromptOrder order) noexcept {
    return order == PromptOrder::TemplateContextQuestion ? "template_context_question"
                                                         : "question_template_context";
}

std::string ComposedPrompt::serialize() const {
    if (order == PromptOrder::TemplateContextQuestion) {
        return template_part + context_part + question_part;
    }
    std::string_view q = question_part;
    while (!q.empty() && (q.front() == '\n' || q.front() == '\r')) q.remove_prefix(1);
    std::string out(q);
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
    out += '\n';
    out += template_part;
    out += context_part;
    return out;
}

std::size_t estimate_tokens(std::string_view text) noexcept {
    return (utf8_length(text) + 3) / 4;
}

std::string render_context(std::span<const SearchHit> hits, const Catalog& catalog,
                           DetailFields fields) {
    std::string out;
    for (const auto& hit : hits) {
        const Course* c = catalog.find(hit.course_id);
        if (!c) throw Error(ErrorKind::UnknownCourseId, std::to_string(hit.course_id));
        if (!out.empty()) out += "\n\n";
        std::string block;
        auto line = [&block](std::string_view label, std::string_view value) {
            if (!block.empty()) block += '\n';
            block.append(label).append(": ").append(value);
        };
        if (fields.contains(DetailField::Title)) line("Title", c->name);
        if (fields.contains(DetailField::Url)) line("URL", c->url);
        if (fields.contains(DetailField::Rating)) {
            line("Rating", c->rating ? format_rating(*c->rating) : "unrated");
        }
        if (fields.contains(DetailField::Difficulty)) line("Difficulty", to_string(c->difficulty));
        if (fields.contains(DetailField::Reason)) line("Description", c->description);
        out += block;
    }
    return out;
}

ComposedPrompt compose_prompt(const PromptTemplate& tmpl, std::string_view context,
                              std::string_view question, PromptOrder order) {
    if (trim(question).empty()) throw Error(ErrorKind::EmptyQuestion, "question is empty");
    tmpl.validate();
    const auto& body = tmpl.body;
    const auto ctx_pos = body.find(kContextPlaceholder);
    const auto q_pos = body.find(kQuestionPlaceholder);
    const auto ctx_end = ctx_pos + kContextPlaceholder.size();
    const auto q_end = q_pos + kQuestionPlaceholder.size();

    ComposedPrompt p;
    p.template_part = body.substr(0, ctx_pos);
    p.context_part = std::string(context);
    p.question_part = body.substr(ctx_end, q_pos - ctx_end);
    p.question_part.append(question);
    p.question_part.append(body, q_end);
    p.requested_count = tmpl.requested_count;
    p.order = order;
    p.estimated_tokens = estimate_tokens(p.serialize());
    return p;
}

FittedPrompt fit_to_budget(const ComposedPrompt& prompt, std::span<const SearchHit> hits,
                           const Catalog& catalog, const PromptTemplate& tmpl,
                           std::size_t budget) {
    if (budget == 0) throw Error(ErrorKind::InvalidArgument, "budget must be positive");
    ComposedPrompt bare = prompt;
    bare.context_part.clear();
    bare.estimated_tokens = estimate_tokens(bare.serialize());
    if (bare.estimated_tokens > budget) {
        throw Error(ErrorKind::BudgetTooSmall,
                    "template and question need " + std::to_string(bare.estimated_tokens) +
                        " tokens, budget is " + std::to_string(budget));
    }

    FittedPrompt out{prompt, std::vector<SearchHit>(hits.begin(), hits.end())};
    out.prompt.estimated_tokens = estimate_tokens(out.prompt.serialize());
    while (out.prompt.estimated_tokens > budget && !out.hits.empty()) {
        // The worst hit is the last one in (score desc, id asc) order.
        auto worst = std::max_element(out.hits.begin(), out.hits.end(), hit_before);
        out.hits.erase(worst);
        out.prompt.context_part = render_context(out.hits, catalog, tmpl.detail_fields);
        out.prompt.estimated_tokens = estimate_tokens(out.prompt.serialize());
    }
    if (out.prompt.estimated_tokens > budget) {
        // Context that did not come from `hits`; drop it entirely.
        out.prompt = bare;
    }
    return out;
}

}  // namespace ramo
