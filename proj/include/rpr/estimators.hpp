#pragma once

#include <Eigen/Dense>
#include <limits>

#include "rpr/sample.hpp"

namespace rpr {

/// Relative eigenvalue cutoff below which a Gram / Jacobian / covariance
/// matrix is treated as singular.
inline constexpr double SINGULARITY_TOLERANCE = 1e-12;

/// A fitted predictive regression. theta stacks (intercept, slopes...);
/// covariance estimates the sandwich law of sqrt(n) (theta_hat - theta), so
/// std_errors[j] = sqrt(covariance(j, j) / n).
struct RobustFit {
    Eigen::VectorXd theta;
    Eigen::VectorXd weights;     ///< per-observation weight in (0, 1]; exactly
                                 ///< 1 iff the score stayed inside the bound
    Eigen::MatrixXd covariance;  ///< sandwich estimate, (k+1) x (k+1)
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;     ///< theta ./ std_errors
    int iterations = 0;
    bool converged = false;
    double tuning_c = std::numeric_limits<double>::infinity();
};

struct HuberOptions {
    double tol = 1e-8;   ///< convergence threshold on ||psi||
    int max_iter = 200;
};

/// Ordinary least squares with a heteroskedasticity-robust sandwich
/// covariance. Identical output to huber_fit with an infinite bound.
RobustFit ols_fit(const TimeSeriesSample& sample);

/// Huberized estimating function: the average over observations of
/// g(z_t, theta) * min(1, c / ||g||) with g = (y_t - w'theta) w and
/// w = (1, x'_{t-1})'. A zero score keeps weight 1; c = +infinity recovers
/// the least-squares normal-equation residual.
Eigen::VectorXd psi(const TimeSeriesSample& sample, const Eigen::VectorXd& theta,
                    double c);

/// Jacobian of psi in theta: observations inside the bound contribute
/// -w w' / n, clipped observations contribute nothing (their weighted score
/// c * g / ||g|| is locally direction-only). Symmetric negative semidefinite.
Eigen::MatrixXd grad_psi(const TimeSeriesSample& sample,
                         const Eigen::VectorXd& theta, double c);

/// Solves psi(theta) = 0 by iteratively reweighted least squares from the
/// OLS start, halving the step until the convex objective underlying psi
/// strictly decreases. Returns the fit with its sandwich covariance
///   [grad_psi]^-1 (avg g g' h^2) [grad_psi]^-1
/// evaluated at the solution. Throws SingularDesignError on a rank-deficient
/// weighted design, ConvergenceError (carrying the last iterate) after
/// max_iter, and DegenerateFitError when the Jacobian at the solution is
/// numerically singular.
RobustFit huber_fit(const TimeSeriesSample& sample, double c,
                    const HuberOptions& options = {});

struct TuningSelection {
    double c = 0.0;
    bool floored = false;  ///< set when the score spread was degenerate and
                           ///< the small-value floor was applied
};

/// Data-driven robustness bound: the `quantile_level` empirical quantile of
/// the OLS score norms ||g(z_t, theta_OLS)||, floored at 1e-8.
TuningSelection choose_c(const TimeSeriesSample& sample,
                         double quantile_level = 0.9);

}  // namespace rpr
