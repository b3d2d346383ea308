// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iags {

/// Machine-parseable failure categories; the CLI prints `category_name()` on exit.
enum class ErrorCategory {
    InvalidInput,
    Io,
    Config,
    Precondition,
    Protocol,
    Timeout,
    MalformedResponse,
    Refiner,
};

constexpr std::string_view category_name(ErrorCategory c) noexcept
{
    switch (c) {
    case ErrorCategory::InvalidInput: return "invalid_input";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Precondition: return "precondition";
    case ErrorCategory::Protocol: return "protocol";
    case ErrorCategory::Timeout: return "timeout";
    case ErrorCategory::MalformedResponse: return "malformed_response";
    case ErrorCategory::Refiner: return "refiner";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category)
    {
    }

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

} // namespace iags
