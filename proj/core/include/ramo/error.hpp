// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ramo {

enum class ErrorKind {
    InvalidArgument,
    MissingColumn,
    EmptyCatalog,
    MalformedCsv,
    DimensionMismatch,
    ProviderAuth,
    ProviderRateLimit,
    ProviderTimeout,
    ProviderFailure,
    EmptyReply,
    FormatVersionMismatch,
    CorruptIndex,
    Io,
    UnknownCourseId,
    EmptyQuestion,
    BudgetTooSmall,
    InvalidTemplate,
    NoMatch,
    InvalidConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. `kind` is stable and meant for
/// dispatch (HTTP status mapping, CLI exit codes); `what()` is for humans.
/// `stage` is filled in by the recommender when an error crosses a
/// pipeline boundary ("embed", "search", "generate").
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& stage() const noexcept { return stage_; }
    const std::string& detail() const noexcept { return detail_; }

    Error with_stage(std::string stage) const;

    bool is_provider_error() const noexcept;

private:
    ErrorKind kind_;
    std::string detail_;
    std::string stage_;
};

}  // namespace ramo
