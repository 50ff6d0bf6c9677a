#pragma once

#include <stdexcept>
#include <string>

namespace mfgclaw {

// Base class for all solver-level failures. Config/usage errors derive from
// std::invalid_argument instead so callers can tell them apart at the CLI.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteImage : SolverError {
    using SolverError::SolverError;
};
struct UnsupportedDimension : SolverError {
    using SolverError::SolverError;
};
struct NonconvexFlux : SolverError {
    using SolverError::SolverError;
};
struct EmptyInterval : SolverError {
    using SolverError::SolverError;
};
struct MinimizationFailed : SolverError {
    using SolverError::SolverError;
};
struct NewtonDiverged : SolverError {
    using SolverError::SolverError;
};
struct SingularSensitivity : SolverError {
    using SolverError::SolverError;
};
struct BadScan : SolverError {
    using SolverError::SolverError;
};
struct NoEquilibrium : SolverError {
    using SolverError::SolverError;
};
struct MultipleEquilibria : SolverError {
    using SolverError::SolverError;
};
struct StencilCrossesSingularity : SolverError {
    using SolverError::SolverError;
};
struct NonDifferentiableSigma0 : SolverError {
    using SolverError::SolverError;
};
struct PresetRequired : SolverError {
    using SolverError::SolverError;
};
struct BadInput : SolverError {
    using SolverError::SolverError;
};
struct StiffnessError : SolverError {
    using SolverError::SolverError;
};
struct RefineGrid : SolverError {
    using SolverError::SolverError;
};
struct ProfileConstructionFailed : SolverError {
    using SolverError::SolverError;
};
struct ReducedRegimeRequired : SolverError {
    using SolverError::SolverError;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace mfgclaw
