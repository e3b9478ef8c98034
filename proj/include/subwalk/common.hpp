#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace subwalk {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quadrature failed to reach the requested tolerance. Carries the partial
/// value and the residual estimate so callers can decide whether to proceed.
struct QuadratureError : Error {
    QuadratureError(const std::string& msg, double partial, double residual)
        : Error(msg + " (partial=" + std::to_string(partial) +
                ", residual=" + std::to_string(residual) + ")"),
          partial_value(partial), residual_estimate(residual) {}
    double partial_value;
    double residual_estimate;
};

/// Requested point lies outside the evaluable/bracketable range.
struct OutOfRangeError : Error {
    using Error::Error;
};

/// An input violates an operation's precondition (e.g. phi(q) != q).
struct DomainError : Error {
    using Error::Error;
};

/// Bad user-facing configuration (unknown catalog id, malformed value, ...).
struct ConfigError : Error {
    using Error::Error;
};

inline double rel_diff(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

/// 1 - exp(-x) without cancellation for small x.
inline double one_minus_exp_neg(double x) { return -std::expm1(-x); }

} // namespace subwalk
