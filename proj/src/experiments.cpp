#include "rpr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "rpr/util.hpp"

namespace rpr {

namespace {

using nlohmann::json;

constexpr double INF = std::numeric_limits<double>::infinity();

std::string grid_point_key(const DgpConfig& d,
                           const std::optional<ContaminationConfig>& cc) {
    std::string key = "n=" + std::to_string(d.n);
    key += ";rho=";
    for (std::size_t i = 0; i < d.rho.size(); ++i)
        key += (i ? "," : "") + format_double(d.rho[i]);
    key += ";beta0=";
    for (std::size_t i = 0; i < d.beta.size(); ++i)
        key += (i ? "," : "") + format_double(d.beta[i]);
    key += ";phi=" + format_double(d.phi);
    key += ";eta=" + format_double(cc ? cc->eta : 0.0);
    return key;
}

ResamplingConfig method_config(Method method, int m, int boot_reps, double c,
                               std::uint64_t seed) {
    ResamplingConfig rc;
    rc.m = m;
    rc.replications = boot_reps;
    rc.seed = seed;
    switch (method) {
        case Method::conventional_subsampling:
            rc.scheme = Scheme::subsampling;
            rc.mode = Pipeline::conventional;
            break;
        case Method::conventional_bootstrap:
            rc.scheme = Scheme::bootstrap;
            rc.mode = Pipeline::conventional;
            break;
        case Method::robust_subsampling:
            rc.scheme = Scheme::subsampling;
            rc.mode = Pipeline::fast_robust;
            rc.tuning_c = c;
            break;
        case Method::robust_bootstrap:
            rc.scheme = Scheme::bootstrap;
            rc.mode = Pipeline::fast_robust;
            rc.tuning_c = c;
            break;
    }
    return rc;
}

json dgp_json(const DgpConfig& d) {
    return json{{"n", d.n},           {"alpha", d.alpha},
                {"beta", d.beta},     {"mu", d.mu},
                {"rho", d.rho},       {"phi", d.phi},
                {"sigma_v", d.sigma_v}, {"sigma_e", d.sigma_e},
                {"x_init", d.x_init}, {"burn_in", d.burn_in}};
}

json method_list_json(const std::vector<Method>& methods) {
    json arr = json::array();
    for (Method m : methods) arr.push_back(method_name(m));
    return arr;
}

double binomial_se(double p, int reps) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / reps);
}

/// Block length for one study evaluation: the configured override when
/// positive, otherwise the minimum-volatility selection over the pipeline's
/// default grid, run under the same resampling settings the test will use.
int study_block_size(const TimeSeriesSample& sample, int fixed_m,
                     const ResamplingConfig& rc, double level) {
    if (fixed_m > 0) return fixed_m;
    CalibrationConfig cal;
    cal.m_grid = default_block_grid(sample.n(), rc.mode);
    cal.target_level = level;
    cal.seed = rc.seed;
    cal.resampling = rc;
    return select_block_size(sample, cal).m;
}

}  // namespace

std::string method_name(Method method) {
    switch (method) {
        case Method::conventional_subsampling: return "conventional_subsampling";
        case Method::conventional_bootstrap: return "conventional_bootstrap";
        case Method::robust_subsampling: return "robust_subsampling";
        case Method::robust_bootstrap: return "robust_bootstrap";
    }
    throw ConfigError("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "conventional_subsampling") return Method::conventional_subsampling;
    if (name == "conventional_bootstrap") return Method::conventional_bootstrap;
    if (name == "robust_subsampling") return Method::robust_subsampling;
    if (name == "robust_bootstrap") return Method::robust_bootstrap;
    throw ConfigError("unknown method name: " + name);
}

ExperimentReport power_study(const PowerStudyConfig& config) {
    if (config.grid.empty()) throw ConfigError("power_study: empty grid");
    if (config.methods.empty()) throw ConfigError("power_study: no methods");
    if (config.mc_replications < 1)
        throw ConfigError("power_study: mc_replications must be >= 1");
    if (!(config.significance > 0.0 && config.significance < 1.0))
        throw ConfigError("power_study: significance must lie in (0, 1)");

    ExperimentReport report;
    report.study = "power";
    report.seed = config.seed;
    {
        json grid = json::array();
        for (const auto& d : config.grid) grid.push_back(dgp_json(d));
        json echo{{"grid", grid},
                  {"methods", method_list_json(config.methods)},
                  {"significance", config.significance},
                  {"mc_replications", config.mc_replications},
                  {"bootstrap_replications", config.bootstrap_replications},
                  {"block_size", config.block_size},
                  {"c_quantile_level", config.c_quantile_level},
                  {"coefficient_index", config.coefficient_index},
                  {"contaminated", config.contamination.has_value()}};
        if (config.contamination)
            echo["contamination"] = json{{"eta", config.contamination->eta},
                                         {"multiplier", config.contamination->multiplier}};
        report.config_echo = echo.dump();
    }

    for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
        const DgpConfig& dgp = config.grid[gi];
        const std::uint64_t grid_seed = derive_seed(config.seed, gi);
        std::vector<int> rejections(config.methods.size(), 0);

        for (int rep = 0; rep < config.mc_replications; ++rep) {
            // Substream layout per replicate: simulation, contamination and
            // block resampling each own a lane, and all methods share the
            // same sample and the same resampling seed.
            TimeSeriesSample sample =
                simulate_dgp(dgp, grid_seed, 4ull * rep);
            if (config.contamination)
                sample = contaminate(sample, *config.contamination, grid_seed,
                                     4ull * rep + 1);
            const double c = choose_c(sample, config.c_quantile_level).c;
            const std::uint64_t resample_seed =
                derive_seed(grid_seed, 4ull * rep + 2);

            for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
                ResamplingConfig rc =
                    method_config(config.methods[mi], 0,
                                  config.bootstrap_replications, c, resample_seed);
                rc.m = study_block_size(sample, config.block_size, rc,
                                        1.0 - config.significance);
                const TestResult res = test_no_predictability(
                    sample, rc, config.significance, config.coefficient_index);
                if (res.reject) ++rejections[mi];
            }
        }

        const std::string key = grid_point_key(dgp, config.contamination);
        for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
            const double rate = static_cast<double>(rejections[mi]) /
                                config.mc_replications;
            report.rows.push_back({key, method_name(config.methods[mi]),
                                   "rejection_rate", rate,
                                   binomial_se(rate, config.mc_replications)});
        }
    }
    return report;
}

ExperimentReport sensitivity_study(const SensitivityStudyConfig& config) {
    if (config.offsets.empty()) throw ConfigError("sensitivity_study: no offsets");
    if (config.methods.empty()) throw ConfigError("sensitivity_study: no methods");
    if (config.mc_replications < 1)
        throw ConfigError("sensitivity_study: mc_replications must be >= 1");

    ExperimentReport report;
    report.study = "sensitivity";
    report.seed = config.seed;
    report.config_echo =
        json{{"dgp", dgp_json(config.dgp)},
             {"offsets", config.offsets},
             {"methods", method_list_json(config.methods)},
             {"level", config.level},
             {"mc_replications", config.mc_replications},
             {"bootstrap_replications", config.bootstrap_replications},
             {"block_size", config.block_size},
             {"c_quantile_level", config.c_quantile_level},
             {"coefficient_index", config.coefficient_index}}
            .dump();

    const std::size_t n_off = config.offsets.size();
    const std::size_t n_meth = config.methods.size();

    // lengths[offset][method][rep]
    std::vector<std::vector<std::vector<double>>> lengths(
        n_off, std::vector<std::vector<double>>(n_meth));

    for (int rep = 0; rep < config.mc_replications; ++rep) {
        const TimeSeriesSample clean =
            simulate_dgp(config.dgp, config.seed, 4ull * rep);
        int imax = 0;
        clean.y.maxCoeff(&imax);
        const std::uint64_t resample_seed =
            derive_seed(config.seed, 4ull * rep + 2);

        for (std::size_t oi = 0; oi < n_off; ++oi) {
            TimeSeriesSample shifted = clean;
            shifted.y(imax) += config.offsets[oi];  // same base sample per offset
            const double c = choose_c(shifted, config.c_quantile_level).c;
            for (std::size_t mi = 0; mi < n_meth; ++mi) {
                ResamplingConfig rc =
                    method_config(config.methods[mi], 0,
                                  config.bootstrap_replications, c, resample_seed);
                rc.m = study_block_size(shifted, config.block_size, rc,
                                        config.level);
                const ConfidenceInterval ci = symmetric_ci(
                    shifted, rc, config.level, config.coefficient_index);
                lengths[oi][mi].push_back(ci.broken_down ? INF : ci.hi - ci.lo);
            }
        }
    }

    for (std::size_t mi = 0; mi < n_meth; ++mi) {
        double base_mean = 0.0;
        for (std::size_t oi = 0; oi < n_off; ++oi) {
            const auto& v = lengths[oi][mi];
            const double mean =
                std::accumulate(v.begin(), v.end(), 0.0) / v.size();
            double var = 0.0;
            for (double d : v) var += (d - mean) * (d - mean);
            const double se = v.size() > 1
                                  ? std::sqrt(var / (v.size() - 1.0) / v.size())
                                  : 0.0;
            if (oi == 0) base_mean = mean;
            const std::string key = "offset=" + format_double(config.offsets[oi]);
            const std::string meth = method_name(config.methods[mi]);
            report.rows.push_back({key, meth, "mean_ci_length", mean, se});
            report.rows.push_back(
                {key, meth, "pct_length_increase",
                 base_mean > 0.0 ? (mean / base_mean - 1.0) * 100.0 : 0.0,
                 base_mean > 0.0 ? se / base_mean * 100.0 : 0.0});
        }
    }
    return report;
}

ExperimentReport quantile_surface(const QuantileSurfaceConfig& config) {
    if (config.c_grid.empty() || config.phi_grid.empty())
        throw ConfigError("quantile_surface: empty grid");
    if (config.mc_replications < 2)
        throw ConfigError("quantile_surface: mc_replications must be >= 2");
    for (double c : config.c_grid)
        if (c < 0.0 || c >= config.n)
            throw ConfigError("quantile_surface: drift c must lie in [0, n)");

    ExperimentReport report;
    report.study = "quantile_surface";
    report.seed = config.seed;
    report.config_echo =
        json{{"c_grid", config.c_grid},
             {"phi_grid", config.phi_grid},
             {"n", config.n},
             {"mc_replications", config.mc_replications},
             {"quantile_level", config.quantile_level},
             {"c_quantile_level", config.c_quantile_level},
             {"se_bootstrap_replications", config.se_bootstrap_replications}}
            .dump();

    std::size_t cell = 0;
    for (double phi : config.phi_grid) {
        for (double c_lu : config.c_grid) {
            DgpConfig dgp;
            dgp.n = config.n;
            dgp.rho = {1.0 - c_lu / config.n};
            dgp.beta = {0.0};
            dgp.phi = phi;
            const std::uint64_t cell_seed = derive_seed(config.seed, cell);

            std::vector<double> tdraws;
            tdraws.reserve(config.mc_replications);
            int failed = 0;
            for (int rep = 0; rep < config.mc_replications; ++rep) {
                // Replicate rep reuses the same innovation stream in every
                // cell (common random numbers), so quantiles vary across the
                // grid only through (c, phi), not through simulation noise.
                const TimeSeriesSample sample = simulate_dgp(dgp, config.seed, rep);
                try {
                    const double c = choose_c(sample, config.c_quantile_level).c;
                    tdraws.push_back(huber_fit(sample, c).t_stats(1));
                } catch (const Error&) {
                    ++failed;  // dropped; reported via n_draws below
                }
            }
            if (tdraws.size() < 2)
                throw DegenerateFitError(
                    "quantile_surface: too few usable replicates in a cell");

            const auto cell_quantile = [&](const std::vector<double>& raw,
                                           bool negate, bool absolute) {
                std::vector<double> v(raw);
                for (double& d : v) d = absolute ? std::abs(d) : (negate ? -d : d);
                std::sort(v.begin(), v.end());
                return empirical_quantile(v, config.quantile_level);
            };
            // Replicates are i.i.d. across Monte Carlo samples, so a plain
            // resampling bootstrap of the draws estimates the quantile's
            // sampling error.
            const auto boot_se = [&](bool negate, bool absolute,
                                     std::uint64_t lane) {
                Rng rng(derive_seed(cell_seed, 7777 + lane), 0);
                std::vector<double> qs(config.se_bootstrap_replications);
                std::vector<double> resample(tdraws.size());
                for (int b = 0; b < config.se_bootstrap_replications; ++b) {
                    for (std::size_t i = 0; i < tdraws.size(); ++i)
                        resample[i] = tdraws[rng.below(tdraws.size())];
                    qs[b] = cell_quantile(resample, negate, absolute);
                }
                const double mean =
                    std::accumulate(qs.begin(), qs.end(), 0.0) / qs.size();
                double var = 0.0;
                for (double q : qs) var += (q - mean) * (q - mean);
                return std::sqrt(var / (qs.size() - 1.0));
            };

            const std::string key = "c=" + format_double(c_lu) +
                                    ";phi=" + format_double(phi);
            report.rows.push_back({key, "robust_t", "quantile_t",
                                   cell_quantile(tdraws, false, false),
                                   boot_se(false, false, 0)});
            report.rows.push_back({key, "robust_t", "quantile_minus_t",
                                   cell_quantile(tdraws, true, false),
                                   boot_se(true, false, 1)});
            report.rows.push_back({key, "robust_t", "quantile_abs_t",
                                   cell_quantile(tdraws, false, true),
                                   boot_se(false, true, 2)});
            report.rows.push_back({key, "robust_t", "n_draws",
                                   static_cast<double>(tdraws.size()), 0.0});
            ++cell;
        }
    }
    return report;
}

double oos_r2(const std::vector<double>& actuals,
              const std::vector<double>& forecast_a,
              const std::vector<double>& forecast_b) {
    if (actuals.empty() || actuals.size() != forecast_a.size() ||
        actuals.size() != forecast_b.size())
        throw ConfigError("oos_r2: series must be nonempty and equal-length");
    double sse_a = 0.0, sse_b = 0.0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        const double da = actuals[i] - forecast_a[i];
        const double db = actuals[i] - forecast_b[i];
        sse_a += da * da;
        sse_b += db * db;
    }
    if (sse_b == 0.0)
        throw UndefinedStatisticError("oos_r2: benchmark error sum is zero");
    return 1.0 - sse_a / sse_b;
}

ExperimentReport rolling_oos_study(const TimeSeriesSample& sample,
                                   const RollingOosConfig& config) {
    if (config.window < sample.k() + 2)
        throw ConfigError("rolling_oos_study: window too small to fit the model");
    if (config.horizon < 1)
        throw ConfigError("rolling_oos_study: horizon must be >= 1");
    const int first = config.window + config.horizon - 1;
    if (first >= sample.n())
        throw ConfigError("rolling_oos_study: sample shorter than one window");

    std::vector<double> actual, f_rob, f_ols, f_mean;
    for (int t = first; t < sample.n(); ++t) {
        const int train_end = t - config.horizon;  // last usable observation
        const TimeSeriesSample train =
            sample.slice(train_end - config.window + 1, config.window);
        RobustFit rob, ols;
        try {
            ols = ols_fit(train);
            rob = huber_fit(train, choose_c(train, config.c_quantile_level).c);
        } catch (const Error&) {
            continue;  // refit failed: exclude this step for every method
        }
        const Eigen::VectorXd w = sample.design_row(t);
        actual.push_back(sample.y(t));
        f_ols.push_back(w.dot(ols.theta));
        f_rob.push_back(w.dot(rob.theta));
        f_mean.push_back(sample.y.head(train_end + 1).mean());
    }
    if (actual.empty())
        throw UndefinedStatisticError("rolling_oos_study: no usable forecast step");

    ExperimentReport report;
    report.study = "rolling_oos";
    report.config_echo = json{{"window", config.window},
                              {"horizon", config.horizon},
                              {"c_quantile_level", config.c_quantile_level},
                              {"coefficient_index", config.coefficient_index},
                              {"n", sample.n()}}
                             .dump();
    const std::string key = "window=" + std::to_string(config.window) +
                            ";horizon=" + std::to_string(config.horizon);
    // Identical perfect forecasts (both error sums exactly zero) compare as
    // equal: the robust-vs-OLS statistic is 0 rather than an undefined 0/0.
    // The mean-benchmark rows below keep the zero-denominator error.
    const auto sse = [&](const std::vector<double>& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < actual.size(); ++i)
            s += (actual[i] - f[i]) * (actual[i] - f[i]);
        return s;
    };
    const double r2_head = (sse(f_rob) == 0.0 && sse(f_ols) == 0.0)
                               ? 0.0
                               : oos_r2(actual, f_rob, f_ols);
    report.rows.push_back({key, "robust_vs_ols", "r2_os", r2_head, 0.0});
    report.rows.push_back({key, "robust_vs_mean", "r2_os_robust",
                           oos_r2(actual, f_rob, f_mean), 0.0});
    report.rows.push_back({key, "ols_vs_mean", "r2_os_ols",
                           oos_r2(actual, f_ols, f_mean), 0.0});
    report.rows.push_back({key, "all", "n_forecasts",
                           static_cast<double>(actual.size()), 0.0});
    return report;
}

}  // namespace rpr
