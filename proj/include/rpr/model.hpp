#pragma once

#include <cstdint>
#include <vector>

#include "rpr/sample.hpp"

namespace rpr {

/// Predictive-regression data generating process:
///
///   y_t = alpha + beta' x_{t-1} + u_t,      u_t = phi * sum_j v_{j,t} + e_t,
///   x_{j,t} = mu + rho_j x_{j,t-1} + v_{j,t},
///
/// with v_{j,t} ~ N(0, sigma_v^2) i.i.d. across components and time and
/// e_t ~ N(0, sigma_e^2) independent of v. phi couples the regression error
/// to the contemporaneous predictor innovations (the endogeneity that makes
/// inference with persistent predictors delicate); with one predictor this
/// is exactly u_t = phi v_t + e_t.
struct DgpConfig {
    int n = 180;                        ///< observations in the sample
    double alpha = 0.0;                 ///< regression intercept
    std::vector<double> beta = {0.0};   ///< slope per predictor
    double mu = 0.0;                    ///< autoregression intercept
    std::vector<double> rho = {0.9};    ///< AR(1) coefficient per predictor, in (-1, 1]
    double phi = -1.0;                  ///< error correlation parameter
    double sigma_v = 1.0;               ///< predictor innovation scale
    double sigma_e = 1.0;               ///< idiosyncratic error scale
    double x_init = 0.0;                ///< starting value x_0 for every component
    int burn_in = 0;                    ///< discarded warm-up steps (100 starts
                                        ///< the process near stationarity)
};

/// Replacement-outlier contamination of the responses: with probability eta
/// (independently per observation) y_t is replaced by
/// multiplier * max(y_1..y_n), the maximum taken over the uncontaminated
/// responses. Predictors are never touched.
struct ContaminationConfig {
    double eta = 0.04;
    double multiplier = 3.0;
};

/// Simulates the process. Observation t of the result pairs y_t with
/// x_{t-1}; the recursion starts at x_0 = x_init after `burn_in` discarded
/// steps. Deterministic in (config, seed, stream).
TimeSeriesSample simulate_dgp(const DgpConfig& config, std::uint64_t seed,
                              std::uint64_t stream = 0);

/// Applies replacement-outlier contamination to a copy of the sample.
/// Deterministic in (config, seed, stream); the clean input is not modified.
TimeSeriesSample contaminate(const TimeSeriesSample& sample,
                             const ContaminationConfig& config,
                             std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace rpr
