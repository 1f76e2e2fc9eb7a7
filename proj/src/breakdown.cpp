#include "rpr/breakdown.hpp"

#include <cmath>
#include <limits>

#include "rpr/model.hpp"

namespace rpr {

namespace {

constexpr double OUTLIER_MAGNITUDE = 1e8;
constexpr double DIVERGENCE_THRESHOLD = 1e6;

int ceil_int(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

void check_common(int n, int m, double t) {
    if (n < 1 || m < 1 || m > n)
        throw ConfigError("breakdown: need 1 <= m <= n");
    if (!(t > 0.0 && t < 1.0))
        throw ConfigError("breakdown: quantile level t must lie in (0, 1)");
}

/// Exact upper tail P(X >= j) for X ~ Binomial(r, q), summed in log space
/// via lgamma so no factorial overflows.
double binomial_upper_tail(int r, double q, int j) {
    if (j <= 0) return 1.0;
    if (j > r) return 0.0;
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    const double lq = std::log(q);
    const double l1q = std::log1p(-q);
    double tail = 0.0;
    for (int i = j; i <= r; ++i) {
        const double lc = std::lgamma(r + 1.0) - std::lgamma(i + 1.0) -
                          std::lgamma(r - i + 1.0);
        tail += std::exp(lc + i * lq + (r - i) * l1q);
    }
    return tail;
}

/// Applies the (0, 1/2] domain cap to a raw breakdown fraction.
double cap_half(double value, bool& capped) {
    if (value > 0.5) {
        capped = true;
        return 0.5;
    }
    return value;
}

int rounded_r(int n, int m, bool& flagged) {
    flagged = (n % m) != 0;
    return n / m;  // rounded down when not integral
}

}  // namespace

BreakdownBounds thm1_subsampling_bounds(int n, int m, double t, double b) {
    check_common(n, m, t);
    if (!(b > 0.0 && b <= 0.5))
        throw ConfigError("breakdown: statistic breakdown b must lie in (0, 1/2]");
    const int r = (n + m - 1) / m;
    const int mb = ceil_int(m * b);

    BreakdownBounds out;
    out.lower = static_cast<double>(mb) / n;

    // Smallest feasible block count; p * mb grows in p, so the first value
    // past the threshold minimizes the product.
    const double threshold = ((1.0 - t) * (n - m + 1) + mb - 1.0) / m;
    int best = -1;
    for (int p = 1; p <= r - 1; ++p) {
        if (static_cast<double>(p) > threshold) {
            best = p * mb;
            break;
        }
    }
    if (best < 0) {
        out.upper = 0.5;
        out.capped = true;
    } else {
        out.upper = cap_half(static_cast<double>(best) / n, out.capped);
    }
    return out;
}

BreakdownBounds thm1_bootstrap_bounds(int n, int m, double t, double b) {
    check_common(n, m, t);
    if (!(b > 0.0 && b <= 0.5))
        throw ConfigError("breakdown: statistic breakdown b must lie in (0, 1/2]");
    const int r = (n + m - 1) / m;
    const int mb = ceil_int(m * b);

    BreakdownBounds out;
    out.lower = static_cast<double>(mb) / n;

    long best = -1;
    for (int p1 = 1; p1 <= m; ++p1) {
        for (int p2 = 1; p2 <= r - 1; ++p2) {
            const long prod = static_cast<long>(p1) * p2;
            if (best >= 0 && prod >= best) continue;
            double q = (static_cast<double>(m) * p2 - p1 + 1.0) / (n - m + 1.0);
            q = std::min(std::max(q, 0.0), 1.0);
            const int need = ceil_int(static_cast<double>(n) * b / p1);
            if (binomial_upper_tail(r, q, need) > 1.0 - t) best = prod;
        }
    }
    if (best < 0) {
        out.upper = 0.5;
        out.capped = true;
    } else {
        out.upper = cap_half(static_cast<double>(best) / n, out.capped);
    }
    return out;
}

BreakdownPoint thm2_robust_subsampling(int n, int m, double t) {
    check_common(n, m, t);
    BreakdownPoint out;
    rounded_r(n, m, out.r_rounded);
    const double threshold = (1.0 - t) * (n - m + 1) - 1.0;
    int p = 0;
    while (p <= n - m + 1 && !(static_cast<double>(p) > threshold)) ++p;
    out.value = cap_half(static_cast<double>(m + p) / n, out.capped);
    return out;
}

BreakdownPoint thm2_robust_bootstrap(int n, int m, double t,
                                     BootstrapVariant variant) {
    check_common(n, m, t);
    BreakdownPoint out;
    const int r = rounded_r(n, m, out.r_rounded);
    int p = 0;
    while (p <= n - m + 1) {
        const double frac =
            std::min((static_cast<double>(p) + 1.0) / (n - m + 1.0), 1.0);
        if (std::pow(frac, r) > 1.0 - t) break;
        ++p;
    }
    const int count = variant == BootstrapVariant::theorem_literal ? m + p : p;
    out.value = cap_half(static_cast<double>(count) / n, out.capped);
    return out;
}

double empirical_breakdown(int sample_size, int m, double t, Scheme scheme,
                           Pipeline mode, std::uint64_t seed,
                           int bootstrap_replications) {
    check_common(sample_size, m, t);
    if (bootstrap_replications < 1)
        throw ConfigError("empirical_breakdown: need bootstrap_replications >= 1");

    DgpConfig dgp;
    dgp.n = sample_size;
    dgp.rho = {0.5};
    dgp.beta = {0.2};
    dgp.phi = -1.0;
    const TimeSeriesSample clean = simulate_dgp(dgp, seed);

    ResamplingConfig config;
    config.scheme = scheme;
    config.block_mode = BlockMode::overlapping;
    config.m = m;
    config.mode = mode;
    config.replications = bootstrap_replications;
    config.seed = derive_seed(seed, 1);
    if (mode == Pipeline::fast_robust)
        config.tuning_c = choose_c(clean).c;  // held fixed across injections

    for (int j = 1; j <= sample_size; ++j) {
        TimeSeriesSample dirty = clean;
        dirty.y.head(j).setConstant(OUTLIER_MAGNITUDE);
        double q;
        try {
            const auto dist = mode == Pipeline::fast_robust
                                  ? fast_robust_distribution(dirty, config)
                                  : conventional_distribution(dirty, config);
            q = quantile(dist, t);
        } catch (const Error&) {
            q = std::numeric_limits<double>::infinity();  // full-sample fit gone
        }
        if (q > DIVERGENCE_THRESHOLD)
            return static_cast<double>(j) / sample_size;
    }
    return 1.0;
}

}  // namespace rpr
