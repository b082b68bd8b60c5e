#include "klab/error.hpp"

namespace klab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidModel: return "InvalidModel";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::NonPositiveRho: return "NonPositiveRho";
        case ErrorCode::StateOverflow: return "StateOverflow";
        case ErrorCode::InsufficientTail: return "InsufficientTail";
        case ErrorCode::DegenerateTails: return "DegenerateTails";
        case ErrorCode::EmptyRegion: return "EmptyRegion";
        case ErrorCode::SchemeInvalid: return "SchemeInvalid";
        case ErrorCode::DegenerateWeights: return "DegenerateWeights";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace klab
