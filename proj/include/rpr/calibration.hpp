#pragma once

#include <cstdint>
#include <vector>

#include "rpr/resampling.hpp"

namespace rpr {

struct CalibrationConfig {
    std::vector<int> m_grid;        ///< candidate block lengths, ascending
    std::vector<double> c_grid;     ///< candidate robustness bounds, ascending
    double target_level = 0.90;     ///< confidence level being calibrated
    int inner_replications = 200;   ///< pseudo-samples per coverage estimate
    double coverage_tolerance = 0.03;
    int coefficient_index = 0;
    std::uint64_t seed = 0;
    /// Scheme / block mode / replication template the candidate intervals
    /// run under; its m (and, for select_robustness, its tuning_c) is
    /// overridden by the candidate being evaluated.
    ResamplingConfig resampling;
};

struct BlockSizeSelection {
    int m = 0;
    bool fallback = false;  ///< grid too short for a volatility window; the
                            ///< middle grid element was returned
};

struct RobustnessSelection {
    double c = 0.0;
    bool fallback = false;  ///< no grid point calibrated; data-driven default
};

/// Default candidate grid for the minimum-volatility block-length search.
/// The conventional pipeline re-estimates the model inside every block, so
/// its blocks must be long enough for a per-block fit to be informative;
/// its grid is anchored at n^(2/3), the usual block-scheme growth rate.
/// The fast robust pipeline evaluates scores at the full-sample fit and
/// never re-estimates, so shorter blocks are usable and buy more draws;
/// its grid is anchored at sqrt(n). Entries are clamped to [2, max(2, n/2)]
/// and deduplicated, so short samples may yield degenerate grids that
/// select_block_size resolves through its fallback rule.
std::vector<int> default_block_grid(int n, Pipeline mode);

/// Minimum-volatility block length: computes the symmetric interval at
/// target_level for every m in m_grid, scores each interior grid point by
/// the running standard deviation of the interval endpoints over the
/// 3-point window centered there, and returns the center of the calmest
/// window (ties: smallest m). Grids shorter than 3 fall back to the middle
/// element with the fallback flag set.
BlockSizeSelection select_block_size(const TimeSeriesSample& sample,
                                     const CalibrationConfig& config);

/// Robustness-bound selection by parametric-resampling coverage. The
/// smallest candidate that fits the data anchors one pseudo-world: its
/// fitted line generates the responses (predictors held fixed) and its
/// empirical residuals — outliers included — are resampled uniformly.
/// Every candidate c is then judged on the same inner_replications
/// pseudo-samples (common random numbers): the symmetric interval at c must
/// cover the anchor slope at a rate within coverage_tolerance of
/// target_level, and the matching intercept interval may not lose
/// materially more coverage than the anchor candidate's. The paired
/// intercept screen is what disciplines the selection: resampled outliers
/// drag the intercept of any fit whose bound is too large to tame them,
/// while on clean data every candidate tracks the anchor. Returns the
/// largest candidate passing both checks; when none passes, the
/// data-driven choose_c default with the fallback flag set.
RobustnessSelection select_robustness(const TimeSeriesSample& sample,
                                      const CalibrationConfig& config);

}  // namespace rpr
