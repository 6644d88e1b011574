#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pseudoglue {

enum class ErrorCode {
    DimensionMismatch,
    NotSymmetric,
    NotPSD,
    RankMismatch,
    CharacteristicMismatch,
    NotAdmissible,
    InvalidFiberSpace,
    DuplicateLabel,
    UnknownLabel,
    NonInjectiveBaseMap,
    MissingFiberMap,
    BaseMapNotInvertible,
    BaseMismatch,
    ProvenanceMismatch,
    DualMapNotInvertible,
    NotInvertible,
    CriterionFails,
    IncompatibleMetrics,
    IncompatibleActions,
    FiberMismatch,
    DimensionTooLarge,
    DegreeOverflow,
    SyntaxError,
    EvaluationError,
    ZeroGluingConstant,
    NonPositiveCoefficient,
    InvalidScenario,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Parser failures also carry the byte offset into the source text.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& message);

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace pseudoglue
