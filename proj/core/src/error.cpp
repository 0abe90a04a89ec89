// SPDX-License-Identifier: Apache-2.0
#include "ramo/error.hpp"

#include <array>
#include <cstdio>

#include "ramo/hash.hpp"

namespace ramo {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::EmptyCatalog: return "EmptyCatalog";
        case ErrorKind::MalformedCsv: return "MalformedCsv";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ProviderAuth: return "ProviderAuth";
        case ErrorKind::ProviderRateLimit: return "ProviderRateLimit";
        case ErrorKind::ProviderTimeout: return "ProviderTimeout";
        case ErrorKind::ProviderFailure: return "ProviderFailure";
        case ErrorKind::EmptyReply: return "EmptyReply";
        case ErrorKind::FormatVersionMismatch: return "FormatVersionMismatch";
        case ErrorKind::CorruptIndex: return "CorruptIndex";
        case ErrorKind::Io: return "Io";
        case ErrorKind::UnknownCourseId: return "UnknownCourseId";
        case ErrorKind::EmptyQuestion: return "EmptyQuestion";
        case ErrorKind::BudgetTooSmall: return "BudgetTooSmall";
        case ErrorKind::InvalidTemplate: return "InvalidTemplate";
        case ErrorKind::NoMatch: return "NoMatch";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      detail_(message) {}

Error Error::with_stage(std::string stage) const {
    Error tagged(kind_, "[" + stage + "] " + detail_);
    tagged.detail_ = detail_;
    tagged.stage_ = std::move(stage);
    return tagged;
}

bool Error::is_provider_error() const noexcept {
    switch (kind_) {
        case ErrorKind::ProviderAuth:
        case ErrorKind::ProviderRateLimit:
        case ErrorKind::ProviderTimeout:
        case ErrorKind::ProviderFailure:
        case ErrorKind::EmptyReply:
        case ErrorKind::DimensionMismatch:
            return true;
        default:
            return false;
    }
}

std::string to_hex(std::uint64_t value) {
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf.data(), 16);
}

}  // namespace ramo
