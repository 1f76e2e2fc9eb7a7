#pragma once

// Slow, independent reference implementations used to validate the fast
// production code paths. Everything here favours obviousness over speed:
// grid searches, finite differences, full re-optimization, long-double
// summation.

#include <Eigen/Dense>
#include <vector>

#include "rpr/sample.hpp"

namespace oracles {

/// Minimizes ||psi|| over (intercept, slope) by a contracting grid search
/// around the OLS fit. Only supports one predictor; accuracy is far below
/// 1e-3 on well-conditioned problems.
Eigen::VectorXd brute_force_huber(const rpr::TimeSeriesSample& sample,
                                  double c);

/// Central-difference Jacobian of psi with step `h` per coordinate.
Eigen::MatrixXd fd_grad_psi(const rpr::TimeSeriesSample& sample,
                            const Eigen::VectorXd& theta, double c,
                            double h = 1e-6);

/// Spearman rank correlation (no tie handling; inputs are continuous draws).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct BlockOracle {
    std::vector<double> fast;   ///< linearized one-step draws
    std::vector<double> refit;  ///< full re-optimization draws
};

/// Matched-studentizer full-reoptimization oracle. For every overlapping
/// block of length m it computes both the linearized draw and the draw built
/// from an actual huber refit on the block, studentizing both with the same
/// replicate sandwich evaluated at the full-sample fit so the comparison
/// isolates the linearization step. Blocks whose replicate Jacobian or
/// covariance is numerically singular, or whose refit fails, are skipped in
/// both outputs.
BlockOracle refit_oracle(const rpr::TimeSeriesSample& sample, int m, double c,
                         int coef);

/// Exact upper binomial tail P(X >= lo) for X ~ Binomial(trials, q),
/// accumulated term by term in long double.
double binomial_upper_tail_exact(int lo, int trials, double q);

}  // namespace oracles
