#include "rpr/model.hpp"

#include <algorithm>
#include <cmath>

#include "rpr/rng.hpp"

namespace rpr {

namespace {

void validate(const DgpConfig& c) {
    if (c.n < 1) throw ConfigError("simulate_dgp: n must be >= 1");
    if (c.beta.empty()) throw ConfigError("simulate_dgp: beta must have at least one component");
    if (c.beta.size() != c.rho.size())
        throw ConfigError("simulate_dgp: beta and rho must have the same length");
    for (double r : c.rho)
        if (!(r > -1.0 && r <= 1.0))
            throw ConfigError("simulate_dgp: rho components must lie in (-1, 1]");
    if (c.sigma_v < 0.0 || c.sigma_e < 0.0)
        throw ConfigError("simulate_dgp: innovation scales must be nonnegative");
    if (c.burn_in < 0) throw ConfigError("simulate_dgp: burn_in must be nonnegative");
}

}  // namespace

TimeSeriesSample simulate_dgp(const DgpConfig& config, std::uint64_t seed,
                              std::uint64_t stream) {
    validate(config);
    const int n = config.n;
    const int k = static_cast<int>(config.beta.size());
    Rng rng(seed, stream);

    // Drawing order is pinned: per step, the k predictor innovations first,
    // then the idiosyncratic error. Burn-in steps consume predictor
    // innovations only.
    Eigen::VectorXd xs(k);
    xs.setConstant(config.x_init);
    for (int b = 0; b < config.burn_in; ++b)
        for (int j = 0; j < k; ++j)
            xs(j) = config.mu + config.rho[j] * xs(j) + config.sigma_v * rng.normal();

    Eigen::VectorXd y(n);
    Eigen::MatrixXd x(n, k);
    for (int t = 0; t < n; ++t) {
        x.row(t) = xs.transpose();  // predictor observed one period before y_t
        double vsum = 0.0;
        for (int j = 0; j < k; ++j) {
            const double v = config.sigma_v * rng.normal();
            vsum += v;
            xs(j) = config.mu + config.rho[j] * xs(j) + v;
        }
        const double e = config.sigma_e * rng.normal();
        double mean = config.alpha;
        for (int j = 0; j < k; ++j) mean += config.beta[j] * x(t, j);
        y(t) = mean + config.phi * vsum + e;
    }
    return TimeSeriesSample(std::move(y), std::move(x));
}

TimeSeriesSample contaminate(const TimeSeriesSample& sample,
                             const ContaminationConfig& config,
                             std::uint64_t seed, std::uint64_t stream) {
    if (!(config.eta >= 0.0 && config.eta <= 1.0))
        throw ConfigError("contaminate: eta must lie in [0, 1]");
    Rng rng(seed, stream);
    const double level = config.multiplier * sample.y.maxCoeff();
    TimeSeriesSample out = sample;
    for (int t = 0; t < out.n(); ++t)
        if (rng.bernoulli(config.eta)) out.y(t) = level;
    return out;
}

}  // namespace rpr
