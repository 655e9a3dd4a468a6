#pragma once

#include <stdexcept>
#include <string>

namespace dcflow {

/// Base class for all library errors. Messages are prefixed with the
/// concrete error name so diagnostics stay greppable across the CLI.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// network
struct DisconnectedGraph final : Error { using Error::Error; };
struct NonpositiveConductance final : Error { using Error::Error; };
struct NoLoadsOrNoSources final : Error { using Error::Error; };
struct SingularBlock final : Error { using Error::Error; };
struct NotSymmetric final : Error { using Error::Error; };

// matrix analysis
struct NotZMatrix final : Error { using Error::Error; };
struct Reducible final : Error { using Error::Error; };
struct NonpositiveNu final : Error { using Error::Error; };

// power flow maps
struct NonpositiveSourceVoltage final : Error { using Error::Error; };
struct CoreInvariantViolation final : Error { using Error::Error; };
struct NonpositiveVoltage final : Error { using Error::Error; };
struct LambdaNotAdmissible final : Error { using Error::Error; };
struct MuNotAdmissible final : Error { using Error::Error; };
struct InvalidNu final : Error { using Error::Error; };

// solvers
struct SingularJacobian final : Error { using Error::Error; };
struct NoConvergence final : Error { using Error::Error; };

/// Continuation step control could not proceed; carries the last parameter
/// value reached. Numerical inconclusiveness, never mapped to a verdict.
struct StepFailure final : Error {
    double theta_last;
    StepFailure(const std::string& msg, double theta) : Error(msg), theta_last(theta) {}
};

// feasibility conditions
struct TooManySubsets final : Error { using Error::Error; };
struct NegativeDemand final : Error { using Error::Error; };
struct InvalidP final : Error { using Error::Error; };

// io / cli
struct DimensionMismatch final : Error { using Error::Error; };
struct ParseError final : Error { using Error::Error; };

}  // namespace dcflow
