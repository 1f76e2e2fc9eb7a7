#pragma once

#include <cstdint>

#include "rpr/resampling.hpp"

namespace rpr {

/// Upper/lower bounds (or an exact value) always live in (0, 1/2]: any
/// formula value above 1/2 leaves the domain where a breakdown fraction is
/// meaningful and is reported as 1/2 with `capped` set.
struct BreakdownBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool capped = false;  ///< upper bound hit the 1/2 domain cap
};

struct BreakdownPoint {
    double value = 0.0;
    bool capped = false;     ///< formula exceeded the 1/2 domain cap
    bool r_rounded = false;  ///< n/m was not integral; r was rounded down
};

/// Which reading of the robust-bootstrap formula to report. The proof
/// counts m + p contaminated points where published reference values track
/// p/n alone; `table_matching` reproduces those values, `theorem_literal`
/// reports (m + p)/n.
enum class BootstrapVariant { table_matching, theorem_literal };

/// Quantile breakdown bounds for subsampling a statistic whose own
/// breakdown point is b: t-quantiles of the replicate law diverge once the
/// contaminated fraction reaches `lower` = ceil(m b)/n, and are guaranteed
/// to diverge at `upper` = min over feasible block counts p <= r - 1 of
/// p ceil(m b)/n subject to p > ((1 - t)(n - m + 1) + ceil(m b) - 1)/m.
BreakdownBounds thm1_subsampling_bounds(int n, int m, double t, double b);

/// Same bounds for the moving-block bootstrap; the upper bound minimizes
/// p1 p2 / n over per-block outlier counts p1 <= m and block counts
/// p2 <= r - 1 such that drawing at least ceil(n b / p1) contaminated
/// blocks among the r selected ones has probability above 1 - t (exact
/// binomial tail).
BreakdownBounds thm1_bootstrap_bounds(int n, int m, double t, double b);

/// Exact quantile breakdown point of the fast robust subsampling
/// distribution: (m + p*)/n with p* the smallest integer p <= n - m + 1
/// satisfying p > (1 - t)(n - m + 1) - 1.
BreakdownPoint thm2_robust_subsampling(int n, int m, double t);

/// Exact quantile breakdown point of the fast robust bootstrap
/// distribution: with p* the smallest integer p <= n - m + 1 such that
/// ((p + 1)/(n - m + 1))^r > 1 - t, reports p*/n (table_matching) or
/// (m + p*)/n (theorem_literal).
BreakdownPoint thm2_robust_bootstrap(
    int n, int m, double t,
    BootstrapVariant variant = BootstrapVariant::table_matching);

/// Operational verifier: on a fixed clean synthetic sample of size n,
/// injects j = 1, 2, ... equal contiguous outliers of magnitude 1e8 into
/// the responses and returns the smallest j/n at which the t-quantile of
/// the chosen resampling distribution exceeds 1e6 (1.0 when no j <= n
/// diverges). The robustness bound for the fast_robust pipeline is chosen
/// on the clean sample and held fixed across j.
double empirical_breakdown(int sample_size, int m, double t, Scheme scheme,
                           Pipeline mode, std::uint64_t seed = 20240801,
                           int bootstrap_replications = 2000);

}  // namespace rpr
