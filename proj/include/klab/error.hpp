#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace klab {

enum class ErrorCode {
    InvalidArgument,
    InvalidModel,
    NoRoot,
    NonPositiveRho,
    StateOverflow,
    InsufficientTail,
    DegenerateTails,
    EmptyRegion,
    SchemeInvalid,
    DegenerateWeights,
    HypothesisViolated,
    DomainError,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace klab
