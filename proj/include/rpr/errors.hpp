#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rpr {

/// Base class for every exception thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value or argument (bad grid, level outside (0,1), ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (CSV schema violations, missing
/// values, duplicate dates, series too short for the requested construction).
class DataError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient regression design: the (weighted) Gram matrix cannot be
/// inverted at the working tolerance.
class SingularDesignError : public Error {
public:
    using Error::Error;
};

/// The estimating-equation Jacobian is numerically singular at the solution,
/// so no sandwich covariance exists (every observation outside the Huber
/// bound, degenerate replicate, ...).
class DegenerateFitError : public Error {
public:
    using Error::Error;
};

/// Iterative fit failed to reach the convergence tolerance; carries the last
/// iterate so a caller can inspect where the search stalled.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> iterate)
        : Error(what), last_iterate(std::move(iterate)) {}

    std::vector<double> last_iterate;
};

/// A statistic whose defining ratio is 0/0 or otherwise undefined on the
/// given inputs (e.g. an out-of-sample R^2 with a zero benchmark error sum).
class UndefinedStatisticError : public Error {
public:
    using Error::Error;
};

}  // namespace rpr
