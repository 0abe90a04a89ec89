// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ramo/catalog.hpp"
#include "ramo/vecindex.hpp"

namespace ramo {

enum class DetailField : std::uint8_t { Title, Url, Rating, Difficulty, Reason };

/// Small ordered set of DetailField.
class DetailFields {
public:
    DetailFields() = default;
    DetailFields(std::initializer_list<DetailField> fields);

    bool contains(DetailField f) const noexcept { return (bits_ >> static_cast<unsigned>(f)) & 1U; }
    void insert(DetailField f) noexcept { bits_ |= 1U << static_cast<unsigned>(f); }
    bool empty() const noexcept { return bits_ == 0; }

    friend bool operator==(DetailFields, DetailFields) = default;

private:
    std::uint8_t bits_ = 0;
};

/// Parses "title, url, rating" style lists. Throws InvalidTemplate.
DetailFields parse_detail_fields(std::string_view text);

inline constexpr std::string_view kContextPlaceholder = "{context}";
inline constexpr std::string_view kQuestionPlaceholder = "{question}";

/// Token limits of the hosted models the generator targets.
inline constexpr std::size_t kGpt35TurboTokenLimit = 4096;
inline constexpr std::size_t kGpt4TokenLimit = 8192;
inline constexpr std::size_t kLlama2TokenLimit = 4096;
inline constexpr std::size_t kLlama3TokenLimit = 8000;
inline constexpr std::size_t kDefaultTokenBudget = kGpt35TurboTokenLimit;
/// Held back from the budget for the generator's reply.
inline constexpr std::size_t kReplyReserveTokens = 512;

struct PromptTemplate {
    std::string id;
    /// Contains {context} then {question}, each exactly once.
    std::string body;
    std::optional<int> requested_count;
    DetailFields detail_fields{DetailField::Title};

    /// Throws InvalidTemplate when the placeholder rules are broken.
    void validate() const;
};

/// Builds a template from a body, parsing requested_count out of the text.
PromptTemplate make_template(std::string id, std::string body,
                             DetailFields fields = {DetailField::Title});

/// Finds "recommend <N> courses", N a numeral or one..ten.
std::optional<int> parse_requested_count(std::string_view text);

/// The stock recommender instructions followed by the Context and
/// User Question slots.
PromptTemplate default_template();

/// Template file: optional front matter between "---" lines with keys
/// id, detail_fields, requested_count; the rest is the body.
PromptTemplate parse_template_file(std::string_view contents, std::string fallback_id);
PromptTemplate load_template_file(const std::filesystem::path& path);
/// Every *.txt / *.tmpl file in `dir`, keyed by id.
std::map<std::string, PromptTemplate> load_template_dir(const std::filesystem::path& dir);

enum class PromptOrder : std::uint8_t {
    TemplateContextQuestion,  // as displayed in the prompt table
    QuestionTemplateContext,  // as enumerated in the prose
};

std::optional<PromptOrder> parse_prompt_order(std::string_view text);
std::string_view to_string(PromptOrder order) noexcept;

/// The three pieces of a generator prompt. template_part is the template
/// body up to {context}; question_part runs from the end of {context}
/// through the substituted question to the end of the body.
struct ComposedPrompt {
    std::string template_part;
    std::string context_part;
    std::string question_part;
    std::size_t estimated_tokens = 0;
    std::optional<int> requested_count;  // carried over from the template
    PromptOrder order = PromptOrder::TemplateContextQuestion;

    std::string serialize() const;

    friend bool operator==(const ComposedPrompt&, const ComposedPrompt&) = default;
};

/// ceil(code points / 4).
std::size_t estimate_tokens(std::string_view text) noexcept;

/// Blocks in hit order separated by a blank line; each block lists the
/// requested fields as "Title: …", "URL: …", "Rating: …", "Difficulty: …",
/// "Description: …". Throws UnknownCourseId.
std::string render_context(std::span<const SearchHit> hits, const Catalog& catalog,
                           DetailFields fields);

/// Throws EmptyQuestion when the question is blank.
ComposedPrompt compose_prompt(const PromptTemplate& tmpl, std::string_view context,
                              std::string_view question,
                              PromptOrder order = PromptOrder::TemplateContextQuestion);

struct FittedPrompt {
    ComposedPrompt prompt;
    std::vector<SearchHit> hits;  // survivors, in input order
};

/// Drops the lowest-scored hit until the prompt fits `budget` tokens. The
/// template and question are never cut. Throws BudgetTooSmall when they alone
/// exceed the budget.
FittedPrompt fit_to_budget(const ComposedPrompt& prompt, std::span<const SearchHit> hits,
                           const Catalog& catalog, const PromptTemplate& tmpl,
                           std::size_t budget);

}  // namespace ramo
