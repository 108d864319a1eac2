#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crisisgt {

enum class ErrorCode {
    Io,
    MalformedRecord,
    EmptyInput,
    InvalidArgument,
    UnknownMethod,
    UnknownSession,
    UnknownTweet,
    DuplicateSession,
    SessionFinalized,
    SessionOpen,
    BudgetExceeded,
    UnderBudget,
    InvalidRating,
    CorruptLog,
    UnknownDataset,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; the code is stable and
// machine readable (the CLI and the HTTP layer both map it).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace crisisgt
