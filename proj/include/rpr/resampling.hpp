#pragma once

#include <cstdint>
#include <vector>

#include "rpr/estimators.hpp"
#include "rpr/rng.hpp"
#include "rpr/sample.hpp"

namespace rpr {

enum class Scheme { subsampling, bootstrap };
enum class BlockMode { overlapping, nonoverlapping };

/// Which statistic each replicate evaluates: `conventional` re-estimates by
/// least squares and studentizes the centered coefficient; `fast_robust`
/// never re-optimizes and instead expands the robust estimating equation
/// around the full-sample fit.
enum class Pipeline { conventional, fast_robust };

struct ResamplingConfig {
    Scheme scheme = Scheme::subsampling;
    BlockMode block_mode = BlockMode::overlapping;
    int m = 0;               ///< block length
    int replications = 299;  ///< bootstrap replicates; subsampling enumerates
                             ///< every block and ignores this
    Pipeline mode = Pipeline::fast_robust;
    double tuning_c = std::numeric_limits<double>::infinity();  ///< Huber bound
                             ///< for the fast_robust pipeline
    std::uint64_t seed = 0;  ///< drives bootstrap block selection only
};

struct Block {
    int start = 0;
    int length = 0;
    bool truncated = false;  ///< short trailing block (nonoverlapping mode)
};

/// Block index ranges over a sample of size n: overlapping mode yields the
/// n - m + 1 windows of length m; nonoverlapping mode tiles the sample into
/// ceil(n / m) blocks whose last one may be short (flagged).
std::vector<Block> blocks(int n, int m, BlockMode mode);

/// Moving-block bootstrap resample: ceil(n / m) blocks drawn uniformly with
/// replacement, concatenated, truncated to n observations.
TimeSeriesSample bootstrap_resample(const TimeSeriesSample& sample, int m,
                                    Rng& rng,
                                    BlockMode mode = BlockMode::overlapping);

/// The empirical law of the replicate statistics. Replicates whose statistic
/// does not exist (rank-deficient design, singular Jacobian or covariance)
/// enter as +infinity and sort last; `n_effective` counts the finite draws.
struct ResamplingDistribution {
    std::vector<double> draws;  ///< sorted ascending
    int n_effective = 0;
    int scale_k = 0;  ///< replicate size in the sqrt(k) normalization
                      ///< (m for subsampling, n for bootstrap)
};

/// Least-squares replicate distribution: per replicate z* of size k, the
/// draw is (coef*(z*) - coef(full)) / se*(z*) for the selected coefficient.
/// Subsampling enumerates blocks deterministically; bootstrap draws
/// `replications` resamples from the seed. Throughout this module
/// coefficient_index 0..k-1 selects a slope and -1 selects the intercept.
ResamplingDistribution conventional_distribution(const TimeSeriesSample& sample,
                                                 const ResamplingConfig& config,
                                                 int coefficient_index = 0);

/// Fast robust replicate distribution: with theta_hat the full-sample Huber
/// fit at tuning_c, each replicate z* of size k contributes the selected
/// component of
///   sqrt(k) [Sigma*_k]^{-1/2} ( -[grad_psi_k(z*, theta_hat)]^{-1}
///                               psi_k(z*, theta_hat) ),
/// a one-step expansion of the re-optimized estimator that reuses the
/// full-sample fit. Sigma*_k is the replicate sandwich at theta_hat and its
/// inverse square root is the symmetric eigendecomposition root.
ResamplingDistribution fast_robust_distribution(const TimeSeriesSample& sample,
                                                const ResamplingConfig& config,
                                                int coefficient_index = 0);

/// Quantile of the resampling law: smallest draw x with P*(X <= x) >= t.
/// The infimum over an empty set is +infinity, so a heavy enough +infinity
/// mass makes upper quantiles infinite.
double quantile(const ResamplingDistribution& distribution, double t);

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool broken_down = false;  ///< quantile was +infinity; interval is the
                               ///< whole real line
};

/// Two-sided symmetric interval for one slope: the `level` quantile q of the
/// |draw| distribution, mapped back to the estimate scale as
/// theta_j -+ q * sigma_j / sqrt(n) (std_errors already carry the 1/sqrt(n)).
ConfidenceInterval symmetric_ci(const TimeSeriesSample& sample,
                                const ResamplingConfig& config, double level,
                                int coefficient_index = 0);

struct TestResult {
    double statistic = 0.0;       ///< |t| for the tested slope
    double critical_value = 0.0;  ///< |draw| quantile at 1 - significance
    double p_value = 1.0;
    ConfidenceInterval ci;
    bool reject = false;
    int coefficient_index = 0;
};

/// Tests H0: beta_j = 0 at the given significance by checking whether 0 lies
/// outside the symmetric interval at confidence 1 - significance. The
/// p-value is the smallest significance at which 0 is excluded, located by
/// bisection to 1e-4.
TestResult test_no_predictability(const TimeSeriesSample& sample,
                                  const ResamplingConfig& config,
                                  double significance,
                                  int coefficient_index = 0);

}  // namespace rpr
