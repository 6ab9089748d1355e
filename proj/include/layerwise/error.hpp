#pragma once
// error.hpp - the single exception type raised by every layerwise operation.

#include <stdexcept>
#include <string>
#include <string_view>

namespace layerwise {

enum class ErrorCode {
    InvalidArgument,
    NegativeDomain,
    NonpositiveDomain,
    DomainNotInUnitInterval,
    DomainTooSmall,
    QuantileDomainDegenerate,
    StageTooShallow,
    HNotSmallEnough,
    UncertifiedTube,
    WorkBudgetExhausted,
    MeasureBoundViolated,
    CompressorNotLossless,
    FuelExhausted,
    PrefixTooShort,
    UnachievableTolerance,
    NeverHitWithinFuel,
    SourceExhausted,
    PersistentStraddle,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeDomain: return "NegativeDomain";
    case ErrorCode::NonpositiveDomain: return "NonpositiveDomain";
    case ErrorCode::DomainNotInUnitInterval: return "DomainNotInUnitInterval";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::QuantileDomainDegenerate: return "QuantileDomainDegenerate";
    case ErrorCode::StageTooShallow: return "StageTooShallow";
    case ErrorCode::HNotSmallEnough: return "HNotSmallEnough";
    case ErrorCode::UncertifiedTube: return "UncertifiedTube";
    case ErrorCode::WorkBudgetExhausted: return "WorkBudgetExhausted";
    case ErrorCode::MeasureBoundViolated: return "MeasureBoundViolated";
    case ErrorCode::CompressorNotLossless: return "CompressorNotLossless";
    case ErrorCode::FuelExhausted: return "FuelExhausted";
    case ErrorCode::PrefixTooShort: return "PrefixTooShort";
    case ErrorCode::UnachievableTolerance: return "UnachievableTolerance";
    case ErrorCode::NeverHitWithinFuel: return "NeverHitWithinFuel";
    case ErrorCode::SourceExhausted: return "SourceExhausted";
    case ErrorCode::PersistentStraddle: return "PersistentStraddle";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
    throw Error(code, detail);
}

}  // namespace layerwise
