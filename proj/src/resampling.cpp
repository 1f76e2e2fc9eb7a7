#include "rpr/resampling.hpp"

#include <algorithm>
#include <cmath>

#include "rpr/util.hpp"

namespace rpr {

namespace {

constexpr double INF = std::numeric_limits<double>::infinity();

/// Relative floor under which a replicate standard error counts as exactly
/// zero (degenerate replicate, e.g. an interpolated or constant response).
constexpr double DEGENERATE_SE_TOLERANCE = 1e-10;

void validate(const TimeSeriesSample& sample, const ResamplingConfig& config,
              int coefficient_index) {
    if (config.m < 1 || config.m > sample.n())
        throw ConfigError("resampling: block length m must lie in [1, n]");
    if (coefficient_index < -1 || coefficient_index >= sample.k())
        throw ConfigError("resampling: coefficient_index out of range");
    if (config.scheme == Scheme::bootstrap && config.replications < 1)
        throw ConfigError("resampling: bootstrap needs replications >= 1");
}

TimeSeriesSample assemble(const TimeSeriesSample& sample,
                          const std::vector<Block>& pool,
                          const std::vector<std::size_t>& picks, int n) {
    Eigen::VectorXd y(n);
    Eigen::MatrixXd x(n, sample.k());
    int filled = 0;
    for (std::size_t p : picks) {
        const Block& b = pool[p];
        const int take = std::min(b.length, n - filled);
        y.segment(filled, take) = sample.y.segment(b.start, take);
        x.middleRows(filled, take) = sample.x.middleRows(b.start, take);
        filled += take;
        if (filled == n) break;
    }
    return TimeSeriesSample(std::move(y), std::move(x));
}

/// Runs `draw_fn` over every replicate the (scheme, block_mode) pair
/// generates and collects the resulting distribution. draw_fn receives the
/// replicate sample and must return the (possibly infinite) draw.
template <class DrawFn>
ResamplingDistribution collect(const TimeSeriesSample& sample,
                               const ResamplingConfig& config, DrawFn draw_fn) {
    ResamplingDistribution dist;
    if (config.scheme == Scheme::subsampling) {
        dist.scale_k = config.m;
        for (const Block& b : blocks(sample.n(), config.m, config.block_mode))
            dist.draws.push_back(draw_fn(sample.slice(b.start, b.length)));
    } else {
        dist.scale_k = sample.n();
        for (int i = 0; i < config.replications; ++i) {
            // Every replicate owns a substream of (seed, i), so the draw it
            // sees is independent of evaluation order.
            Rng rng(config.seed, static_cast<std::uint64_t>(i));
            dist.draws.push_back(
                draw_fn(bootstrap_resample(sample, config.m, rng, config.block_mode)));
        }
    }
    std::sort(dist.draws.begin(), dist.draws.end());
    dist.n_effective = static_cast<int>(
        std::count_if(dist.draws.begin(), dist.draws.end(),
                      [](double d) { return std::isfinite(d); }));
    return dist;
}

ResamplingDistribution conventional_impl(const TimeSeriesSample& sample,
                                         const ResamplingConfig& config,
                                         int coefficient_index,
                                         const RobustFit& full) {
    const int j = coefficient_index + 1;  // slope j lives at theta index j+1
    const double center = full.theta(j);
    return collect(sample, config, [&](const TimeSeriesSample& rep) -> double {
        RobustFit f;
        try {
            f = ols_fit(rep);
        } catch (const Error&) {
            return INF;  // re-estimation failed; counts as a diverged replicate
        }
        const double num = f.theta(j) - center;
        const double se = f.std_errors(j);
        const double scale = 1.0 + std::abs(f.theta(j)) + std::abs(center);
        if (se <= DEGENERATE_SE_TOLERANCE * scale) {
            // Zero replicate noise: an exactly reproduced estimate is a zero
            // draw, anything else diverges.
            return std::abs(num) <= DEGENERATE_SE_TOLERANCE * scale ? 0.0 : INF;
        }
        return num / se;
    });
}

ResamplingDistribution fast_robust_impl(const TimeSeriesSample& sample,
                                        const ResamplingConfig& config,
                                        int coefficient_index,
                                        const RobustFit& full) {
    const int j = coefficient_index + 1;
    const Eigen::VectorXd theta = full.theta;
    const double c = config.tuning_c;
    return collect(sample, config, [&](const TimeSeriesSample& rep) -> double {
        const int kk = rep.n();
        const int p = rep.k() + 1;

        Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(p, p);
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
        for (int t = 0; t < kk; ++t) {
            const Eigen::VectorXd wr = rep.design_row(t);
            const Eigen::VectorXd g = (rep.y(t) - wr.dot(theta)) * wr;
            const double norm = g.norm();
            const double h = (norm == 0.0 || norm <= c) ? 1.0 : c / norm;
            score += g * h;
            if (norm <= c) jac.noalias() -= wr * wr.transpose();
            const Eigen::VectorXd gh = g * h;
            meat.noalias() += gh * gh.transpose();
        }
        score /= kk;
        jac /= kk;
        meat /= kk;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jeig(jac);
        const double jtop = jeig.eigenvalues().cwiseAbs().maxCoeff();
        if (!(jtop > 0.0) ||
            jeig.eigenvalues().cwiseAbs().minCoeff() <= SINGULARITY_TOLERANCE * jtop)
            return INF;  // singular Jacobian: fully clipped replicate
        const Eigen::MatrixXd jinv = jeig.eigenvectors() *
                                     jeig.eigenvalues().cwiseInverse().asDiagonal() *
                                     jeig.eigenvectors().transpose();

        const Eigen::MatrixXd sigma = jinv * meat * jinv.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> seig(sigma);
        const double stop = seig.eigenvalues().cwiseAbs().maxCoeff();
        if (!(stop > 0.0) ||
            seig.eigenvalues().minCoeff() <= SINGULARITY_TOLERANCE * stop)
            return INF;  // replicate covariance not invertible
        const Eigen::MatrixXd sinv_half =
            seig.eigenvectors() *
            seig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
            seig.eigenvectors().transpose();

        const Eigen::VectorXd studentized =
            std::sqrt(static_cast<double>(kk)) * (sinv_half * (-(jinv * score)));
        return studentized(j);
    });
}

/// Distribution plus the full-sample fit it is centered on, so interval and
/// test construction fit the sample exactly once.
struct Prepared {
    RobustFit fit;
    ResamplingDistribution abs_draws;
};

Prepared prepare_abs(const TimeSeriesSample& sample,
                     const ResamplingConfig& config, int coefficient_index) {
    validate(sample, config, coefficient_index);
    Prepared prep;
    ResamplingDistribution dist;
    if (config.mode == Pipeline::conventional) {
        prep.fit = ols_fit(sample);
        dist = conventional_impl(sample, config, coefficient_index, prep.fit);
    } else {
        prep.fit = huber_fit(sample, config.tuning_c);
        dist = fast_robust_impl(sample, config, coefficient_index, prep.fit);
    }
    for (double& d : dist.draws) d = std::abs(d);
    std::sort(dist.draws.begin(), dist.draws.end());
    prep.abs_draws = dist;
    return prep;
}

ConfidenceInterval interval_from(const Prepared& prep, double level,
                                 int coefficient_index) {
    const int j = coefficient_index + 1;
    const double q = empirical_quantile(prep.abs_draws.draws, level);
    ConfidenceInterval ci;
    if (std::isinf(q)) {
        ci.lo = -INF;
        ci.hi = INF;
        ci.broken_down = true;
        return ci;
    }
    const double half = q * prep.fit.std_errors(j);
    ci.lo = prep.fit.theta(j) - half;
    ci.hi = prep.fit.theta(j) + half;
    return ci;
}

}  // namespace

std::vector<Block> blocks(int n, int m, BlockMode mode) {
    if (n < 1 || m < 1 || m > n)
        throw ConfigError("blocks: need 1 <= m <= n");
    std::vector<Block> out;
    if (mode == BlockMode::overlapping) {
        out.reserve(n - m + 1);
        for (int i = 0; i + m <= n; ++i) out.push_back({i, m, false});
    } else {
        for (int i = 0; i < n; i += m) {
            const int len = std::min(m, n - i);
            out.push_back({i, len, len < m});
        }
    }
    return out;
}

TimeSeriesSample bootstrap_resample(const TimeSeriesSample& sample, int m,
                                    Rng& rng, BlockMode mode) {
    if (m < 1 || m > sample.n())
        throw ConfigError("bootstrap_resample: need 1 <= m <= n");
    const int n = sample.n();
    const int r = (n + m - 1) / m;  // ceil(n / m) blocks before truncation
    const std::vector<Block> pool = blocks(n, m, mode);
    std::vector<std::size_t> picks(r);
    for (int i = 0; i < r; ++i) picks[i] = rng.below(pool.size());
    return assemble(sample, pool, picks, n);
}

ResamplingDistribution conventional_distribution(const TimeSeriesSample& sample,
                                                 const ResamplingConfig& config,
                                                 int coefficient_index) {
    validate(sample, config, coefficient_index);
    return conventional_impl(sample, config, coefficient_index, ols_fit(sample));
}

ResamplingDistribution fast_robust_distribution(const TimeSeriesSample& sample,
                                                const ResamplingConfig& config,
                                                int coefficient_index) {
    validate(sample, config, coefficient_index);
    return fast_robust_impl(sample, config, coefficient_index,
                            huber_fit(sample, config.tuning_c));
}

double quantile(const ResamplingDistribution& distribution, double t) {
    return empirical_quantile(distribution.draws, t);
}

ConfidenceInterval symmetric_ci(const TimeSeriesSample& sample,
                                const ResamplingConfig& config, double level,
                                int coefficient_index) {
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("symmetric_ci: level must lie in (0, 1)");
    return interval_from(prepare_abs(sample, config, coefficient_index), level,
                         coefficient_index);
}

TestResult test_no_predictability(const TimeSeriesSample& sample,
                                  const ResamplingConfig& config,
                                  double significance, int coefficient_index) {
    if (!(significance > 0.0 && significance < 1.0))
        throw ConfigError("test_no_predictability: significance must lie in (0, 1)");
    const Prepared prep = prepare_abs(sample, config, coefficient_index);
    const int j = coefficient_index + 1;

    TestResult res;
    res.coefficient_index = coefficient_index;
    res.statistic = std::abs(prep.fit.t_stats(j));
    res.critical_value =
        empirical_quantile(prep.abs_draws.draws, 1.0 - significance);
    res.ci = interval_from(prep, 1.0 - significance, coefficient_index);
    res.reject = res.statistic > res.critical_value;

    // Smallest significance that still excludes zero. The rejection
    // indicator is monotone in the significance level, so bisection brackets
    // the switch point.
    const auto rejects_at = [&](double alpha) {
        return res.statistic > empirical_quantile(prep.abs_draws.draws, 1.0 - alpha);
    };
    double lo = 1e-9, hi = 1.0 - 1e-9;
    if (!rejects_at(hi)) {
        res.p_value = 1.0;
    } else if (rejects_at(lo)) {
        res.p_value = 0.0;
    } else {
        while (hi - lo > 1e-4) {
            const double mid = 0.5 * (lo + hi);
            (rejects_at(mid) ? hi : lo) = mid;
        }
        res.p_value = hi;
    }
    return res;
}

}  // namespace rpr
