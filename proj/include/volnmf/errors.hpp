#pragma once

#include <stdexcept>
#include <string>

namespace volnmf {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

/// Cholesky factorization broke down: the matrix is not positive definite
/// (or the shift delta was too small to make it so).
struct NotPositiveDefinite : Error {
    using Error::Error;
};

/// Power iteration failed to stabilize within the iteration cap.
struct ConvergenceFailure : Error {
    using Error::Error;
};

struct RankDeficient : Error {
    using Error::Error;
};

struct DegenerateRays : Error {
    using Error::Error;
};

/// The lambda normalization denominator |logdet(M0'M0 + dI)| is ~0.
struct DegenerateScale : Error {
    using Error::Error;
};

/// 10^6 consecutive rejections while sampling capped Dirichlet columns.
struct RejectionStall : Error {
    using Error::Error;
};

struct SSCConstructionFailed : Error {
    using Error::Error;
};

struct ZeroColumn : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct RaggedRows : Error {
    using Error::Error;
};

struct ColumnCollapse : Error {
    using Error::Error;
};

} // namespace volnmf
