#include "crisisgt/error.hpp"

namespace crisisgt {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io: return "io_error";
        case ErrorCode::MalformedRecord: return "malformed_record";
        case ErrorCode::EmptyInput: return "empty_input";
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::UnknownMethod: return "unknown_method";
        case ErrorCode::UnknownSession: return "unknown_session";
        case ErrorCode::UnknownTweet: return "unknown_tweet";
        case ErrorCode::DuplicateSession: return "duplicate_session";
        case ErrorCode::SessionFinalized: return "session_finalized";
        case ErrorCode::SessionOpen: return "session_open";
        case ErrorCode::BudgetExceeded: return "budget_exceeded";
        case ErrorCode::UnderBudget: return "under_budget";
        case ErrorCode::InvalidRating: return "invalid_rating";
        case ErrorCode::CorruptLog: return "corrupt_log";
        case ErrorCode::UnknownDataset: return "unknown_dataset";
    }
    return "unknown";
}

}  // namespace crisisgt
