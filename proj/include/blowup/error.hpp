#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blowup {

/// Failure categories shared by every module. The CLI maps these onto exit codes.
enum class ErrorCode {
    InvalidArgument,
    NonFinite,
    NoConvergence,
    SingularJacobian,
    SingularPivot,
    StepUnderflow,
    IvpDiverged,
    ConvergedToTrivial,
    ContinuationStalled,
    NotEnergyCritical,
    OutOfRange,
    ZetaOutOfRange,
    SupNotAtOrigin,
    Instability,
    NotBlowingUp,
    InsufficientRecords,
    EmptyTrace,
    EmptyOverlap,
    ParameterMismatch,
    FileFormat,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace blowup
