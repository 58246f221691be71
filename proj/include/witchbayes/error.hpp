#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace witchbayes {

enum class ErrorKind {
    InvalidArgument,
    ParseError,
    AllZeroWeights,
    BothZero,
    Indeterminate,
    ImpossibleEvidence,
    LengthMismatch,
    UnknownLabel,
    UnknownHypothesis,
    UnknownOutcome,
    EmptyCandidates,
    NothingLeft,
    NoSecondLayer,
    XExceedsN,
    UnknownHatColor,
    LabelMismatch,
};

std::string_view to_string(ErrorKind kind);

/// The single exception type thrown by the library. `kind()` is stable and
/// is what the CLI and the session protocol map to exit/status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace witchbayes
