#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpr/calibration.hpp"
#include "rpr/model.hpp"
#include "rpr/resampling.hpp"

namespace rpr {

/// The four test pipelines the studies compare.
enum class Method {
    conventional_subsampling,
    conventional_bootstrap,
    robust_subsampling,
    robust_bootstrap,
};

std::string method_name(Method method);
Method method_from_name(const std::string& name);

/// One report cell. Every value carries its Monte Carlo standard error
/// (0 when the quantity is deterministic given the inputs).
struct ReportCell {
    std::string config_key;
    std::string method;
    std::string metric;
    double value = 0.0;
    double mc_se = 0.0;
};

struct ExperimentReport {
    std::string study;
    std::string config_echo;  ///< canonical JSON echo of the configuration
    std::uint64_t seed = 0;
    std::vector<ReportCell> rows;
};

/// Rejection-frequency study over a grid of data generating processes.
/// Within a replicate all methods see the same simulated (and optionally
/// contaminated) sample, and bootstrap methods share block draws, so method
/// comparisons are common-random-number paired. Rerunning with the same
/// seed and contamination disabled yields the same underlying clean samples.
/// With block_size = 0 every method re-selects its block length per
/// replicate by the minimum-volatility rule over its pipeline's
/// default_block_grid, mirroring how the test is applied to real data.
struct PowerStudyConfig {
    std::vector<DgpConfig> grid;
    std::optional<ContaminationConfig> contamination;
    std::vector<Method> methods = {Method::conventional_subsampling,
                                   Method::robust_subsampling};
    double significance = 0.10;
    int mc_replications = 500;
    int bootstrap_replications = 299;
    int block_size = 0;  ///< 0: per-replicate data-driven selection
    double c_quantile_level = 0.9;
    int coefficient_index = 0;
    std::uint64_t seed = 0;
};
ExperimentReport power_study(const PowerStudyConfig& config);

/// Outlier-sensitivity curve: per replicate the largest response is pushed
/// up by each offset in turn and the symmetric interval length is recorded
/// per method. Reports mean interval lengths and their percentage increase
/// relative to the first offset. Tuning is re-derived from each shifted
/// sample (block_size = 0 selects the block length per offset), so the
/// curve reflects the full data-driven pipeline facing the outlier.
struct SensitivityStudyConfig {
    DgpConfig dgp;  ///< defaults set in the constructor below
    std::vector<double> offsets = {0, 1, 2, 3, 4, 5};
    std::vector<Method> methods = {Method::conventional_subsampling,
                                   Method::robust_subsampling};
    double level = 0.90;
    int mc_replications = 200;
    int bootstrap_replications = 299;
    int block_size = 0;  ///< 0: per-offset data-driven selection
    double c_quantile_level = 0.9;
    int coefficient_index = 0;
    std::uint64_t seed = 0;

    SensitivityStudyConfig() {
        dgp.n = 120;
        dgp.rho = {0.9};
        dgp.beta = {0.0};
    }
};
ExperimentReport sensitivity_study(const SensitivityStudyConfig& config);

/// Null-distribution quantile surface of the robust t-statistic under
/// near-integrated predictors: for each pair (c, phi) on the grid the
/// predictor persistence is rho = 1 - c/n and the study records the
/// quantile_level quantiles of T, -T and |T| with bootstrap Monte Carlo
/// standard errors. Every cell replays the same innovation streams
/// (common random numbers), so quantile movements along the grid reflect
/// the (c, phi) change rather than independent simulation noise.
struct QuantileSurfaceConfig {
    std::vector<double> c_grid = {0, 2, 4, 6, 8, 10};
    std::vector<double> phi_grid = {0, -1, -2, -5};
    int n = 1000;
    int mc_replications = 2000;
    double quantile_level = 0.95;
    double c_quantile_level = 0.9;
    int se_bootstrap_replications = 200;
    std::uint64_t seed = 0;
};
ExperimentReport quantile_surface(const QuantileSurfaceConfig& config);

/// Out-of-sample R^2 of forecast series a against benchmark series b:
/// 1 - SSE(a) / SSE(b). Throws UndefinedStatisticError when SSE(b) = 0.
double oos_r2(const std::vector<double>& actuals,
              const std::vector<double>& forecast_a,
              const std::vector<double>& forecast_b);

/// Walk-forward forecast comparison: at each step the robust and
/// least-squares fits are re-estimated on the trailing `window`
/// observations ending `horizon` periods before the target, and both are
/// benchmarked against the expanding historical mean. A step where any
/// refit fails is excluded from every sum. Reports
///   r2_os        robust vs least squares,
///   r2_os_robust robust vs historical mean,
///   r2_os_ols    least squares vs historical mean.
struct RollingOosConfig {
    int window = 120;
    int horizon = 1;
    double c_quantile_level = 0.9;
    int coefficient_index = 0;
};
ExperimentReport rolling_oos_study(const TimeSeriesSample& sample,
                                   const RollingOosConfig& config);

}  // namespace rpr
