#pragma once

#include <stdexcept>

namespace qesprob {

/// Base type for every error this library raises.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input to a Hermitian-only operation was not Hermitian within tolerance.
struct NotHermitian : Error {
    using Error::Error;
};

/// The iterative eigensolver failed to converge.
struct ConvergenceFailure : Error {
    using Error::Error;
};

/// QR input was numerically rank deficient.
struct RankDeficient : Error {
    using Error::Error;
};

/// Operation defined for two-qubit (4x4) states received another dimension.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// Sampled Gram matrix had a vanishing trace (practically unreachable).
struct DegenerateSample : Error {
    using Error::Error;
};

/// Steering-ellipsoid denominator vanished while the numerator did not;
/// signals numerical corruption of the state, not a valid limit.
struct SingularBloch : Error {
    using Error::Error;
};

/// Accumulators built with different batch sizes cannot be merged.
struct ConfigMismatch : Error {
    using Error::Error;
};

/// Summary requested from an accumulator holding zero total weight.
struct EmptyAccumulator : Error {
    using Error::Error;
};

/// Run configuration violates an invariant (maps to CLI exit code 2).
struct InvalidConfig : Error {
    using Error::Error;
};

/// Output file could not be written (maps to CLI exit code 3).
struct IoError : Error {
    using Error::Error;
};

}  // namespace qesprob
