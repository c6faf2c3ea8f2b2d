#pragma once

#include <stdexcept>
#include <string>

namespace rotsync {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or mismatched matrix/graph dimensions.
struct DimensionError : Error {
    using Error::Error;
};

/// Principal logarithm requested at or too close to the cut locus.
struct CutLocusError : Error {
    using Error::Error;
};

/// Iterative procedure failed to converge within its iteration budget.
struct ConvergenceError : Error {
    using Error::Error;
};

/// Numerical integration failed to reach the requested tolerance.
struct QuadratureError : Error {
    using Error::Error;
};

/// Problem is ill-posed for the requested query (disconnected graph,
/// component without anchor, zero-information edges, ...).
struct IllPosedError : Error {
    using Error::Error;
};

/// Acceptance-rejection sampler exceeded its proposal budget.
struct SamplerStuckError : Error {
    using Error::Error;
};

/// Malformed input file.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace rotsync
