#include "rpr/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpr {

namespace {

constexpr double INF = std::numeric_limits<double>::infinity();

// How much paired intercept coverage a candidate may lose, relative to the
// most robust candidate, before select_robustness rejects it. Wide enough
// to tolerate the mild drift a clipping-level change induces on clean data,
// narrow enough to catch the collapse that re-injected outliers cause once
// the bound stops taming them.
constexpr double INTERCEPT_SCREEN_TOLERANCE = 0.08;

void check_ascending_nonempty(bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
}

double sd3(double a, double b, double c) {
    const double mean = (a + b + c) / 3.0;
    return std::sqrt(((a - mean) * (a - mean) + (b - mean) * (b - mean) +
                      (c - mean) * (c - mean)) /
                     2.0);
}

}  // namespace

std::vector<int> default_block_grid(int n, Pipeline mode) {
    if (n < 2) throw ConfigError("default_block_grid: n must be >= 2");
    const bool refits = mode == Pipeline::conventional;
    const double anchor = refits ? std::pow(static_cast<double>(n), 2.0 / 3.0)
                                 : std::sqrt(static_cast<double>(n));
    const std::vector<double> factors =
        refits ? std::vector<double>{0.7, 0.85, 1.0, 1.2, 1.45}
               : std::vector<double>{0.4, 0.55, 0.7, 0.85, 1.0, 1.2};
    std::vector<int> grid;
    for (double f : factors) {
        const int m = std::clamp(static_cast<int>(std::lround(f * anchor)), 2,
                                 std::max(2, n / 2));
        if (grid.empty() || m > grid.back()) grid.push_back(m);
    }
    return grid;
}

BlockSizeSelection select_block_size(const TimeSeriesSample& sample,
                                     const CalibrationConfig& config) {
    const auto& grid = config.m_grid;
    check_ascending_nonempty(!grid.empty(), "select_block_size: empty m_grid");
    check_ascending_nonempty(std::is_sorted(grid.begin(), grid.end()),
                             "select_block_size: m_grid must be ascending");
    if (!(config.target_level > 0.0 && config.target_level < 1.0))
        throw ConfigError("select_block_size: target_level must lie in (0, 1)");

    if (grid.size() < 3)
        return {grid[grid.size() / 2], true};

    std::vector<double> lo(grid.size()), hi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ResamplingConfig rc = config.resampling;
        rc.m = grid[i];
        const ConfidenceInterval ci = symmetric_ci(
            sample, rc, config.target_level, config.coefficient_index);
        lo[i] = ci.lo;
        hi[i] = ci.hi;
    }

    // Endpoint volatility over each 3-point window; infinite (broken-down)
    // endpoints make a window ineligible unless every window is.
    std::size_t best = 1;
    double best_vol = INF;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        double vol;
        if (std::isfinite(lo[i - 1]) && std::isfinite(lo[i]) &&
            std::isfinite(lo[i + 1]) && std::isfinite(hi[i - 1]) &&
            std::isfinite(hi[i]) && std::isfinite(hi[i + 1]))
            vol = sd3(lo[i - 1], lo[i], lo[i + 1]) + sd3(hi[i - 1], hi[i], hi[i + 1]);
        else
            vol = INF;
        if (vol < best_vol) {  // strict: ties keep the smallest m
            best_vol = vol;
            best = i;
        }
    }
    return {grid[best], false};
}

RobustnessSelection select_robustness(const TimeSeriesSample& sample,
                                      const CalibrationConfig& config) {
    const auto& grid = config.c_grid;
    check_ascending_nonempty(!grid.empty(), "select_robustness: empty c_grid");
    check_ascending_nonempty(std::is_sorted(grid.begin(), grid.end()),
                             "select_robustness: c_grid must be ascending");
    if (!(config.target_level > 0.0 && config.target_level < 1.0))
        throw ConfigError("select_robustness: target_level must lie in (0, 1)");
    if (config.inner_replications < 1)
        throw ConfigError("select_robustness: inner_replications must be >= 1");
    if (config.coefficient_index < 0 || config.coefficient_index >= sample.k())
        throw ConfigError("select_robustness: coefficient_index out of range");

    const int n = sample.n();
    const int slope = config.coefficient_index + 1;
    for (double c : grid)
        if (!(c > 0.0))
            throw ConfigError("select_robustness: c_grid entries must be positive");

    // The smallest fittable candidate anchors the pseudo-world: its fitted
    // line generates the responses and its residuals -- outliers included --
    // are resampled uniformly. Every candidate interval is then judged in
    // this one world, on shared pseudo-samples.
    RobustFit anchor;
    bool have_anchor = false;
    for (double c : grid) {
        try {
            anchor = huber_fit(sample, c);
            have_anchor = true;
            break;
        } catch (const Error&) {
        }
    }
    if (!have_anchor) return {choose_c(sample).c, true};
    const Eigen::VectorXd resid =
        sample.y - Eigen::VectorXd::Constant(n, anchor.theta(0)) -
        sample.x * anchor.theta.tail(sample.k());

    std::vector<double> cov_slope(grid.size(), 0.0), cov_int(grid.size(), 0.0);
    for (std::size_t ci_idx = 0; ci_idx < grid.size(); ++ci_idx) {
        ResamplingConfig rc = config.resampling;
        rc.mode = Pipeline::fast_robust;
        rc.tuning_c = grid[ci_idx];

        int covered_slope = 0, covered_int = 0;
        for (int rep = 0; rep < config.inner_replications; ++rep) {
            // Lanes depend on rep only, so all candidates see the same
            // pseudo-samples and the same replicate randomness (common
            // random numbers): coverage differences across c are paired.
            Rng rng(config.seed, rep);
            TimeSeriesSample pseudo = sample;
            for (int t = 0; t < n; ++t)
                pseudo.y(t) = anchor.theta(0) +
                              sample.x.row(t).dot(anchor.theta.tail(sample.k())) +
                              resid(static_cast<int>(rng.below(
                                  static_cast<std::uint64_t>(n))));
            rc.seed = derive_seed(config.seed, 100000 + rep);
            try {
                const ConfidenceInterval cs = symmetric_ci(
                    pseudo, rc, config.target_level, config.coefficient_index);
                covered_slope +=
                    cs.broken_down || (anchor.theta(slope) >= cs.lo &&
                                       anchor.theta(slope) <= cs.hi);
                const ConfidenceInterval ci =
                    symmetric_ci(pseudo, rc, config.target_level, -1);
                covered_int += ci.broken_down || (anchor.theta(0) >= ci.lo &&
                                                  anchor.theta(0) <= ci.hi);
            } catch (const Error&) {
                // an unfittable pseudo-sample counts as a miss
            }
        }
        cov_slope[ci_idx] =
            static_cast<double>(covered_slope) / config.inner_replications;
        cov_int[ci_idx] =
            static_cast<double>(covered_int) / config.inner_replications;
    }

    // Anchor-relative intercept screen: replacement outliers drag the
    // intercept of any fit whose bound is too large to tame them, so a
    // candidate whose intercept interval loses materially more coverage
    // than the most robust candidate's is rejected even if its slope
    // interval calibrates.
    double chosen = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(cov_slope[i] - config.target_level) >
            config.coverage_tolerance)
            continue;
        if (cov_int[i] < cov_int.front() - INTERCEPT_SCREEN_TOLERANCE) continue;
        chosen = grid[i];  // ascending grid: the last hit is the largest
        found = true;
    }

    if (found) return {chosen, false};
    return {choose_c(sample).c, true};
}

}  // namespace rpr
