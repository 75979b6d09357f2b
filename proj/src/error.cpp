#include "blowup/error.hpp"

namespace blowup {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::NonFinite: return "non-finite";
        case ErrorCode::NoConvergence: return "no-convergence";
        case ErrorCode::SingularJacobian: return "singular-jacobian";
        case ErrorCode::SingularPivot: return "singular-pivot";
        case ErrorCode::StepUnderflow: return "step-underflow";
        case ErrorCode::IvpDiverged: return "ivp-diverged";
        case ErrorCode::ConvergedToTrivial: return "converged-to-trivial";
        case ErrorCode::ContinuationStalled: return "continuation-stalled";
        case ErrorCode::NotEnergyCritical: return "not-energy-critical";
        case ErrorCode::OutOfRange: return "out-of-range";
        case ErrorCode::ZetaOutOfRange: return "zeta-out-of-range";
        case ErrorCode::SupNotAtOrigin: return "sup-not-at-origin";
        case ErrorCode::Instability: return "instability";
        case ErrorCode::NotBlowingUp: return "not-blowing-up";
        case ErrorCode::InsufficientRecords: return "insufficient-records";
        case ErrorCode::EmptyTrace: return "empty-trace";
        case ErrorCode::EmptyOverlap: return "empty-overlap";
        case ErrorCode::ParameterMismatch: return "parameter-mismatch";
        case ErrorCode::FileFormat: return "file-format";
    }
    return "unknown";
}

}  // namespace blowup
