#include "rpr/runner.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rpr/report_io.hpp"
#include "rpr/util.hpp"

namespace rpr {

namespace {

using nlohmann::json;

// Score-norm quantile levels that seed the per-window candidate grid. The
// floor caps how aggressively a window may downweight: a level-q bound can
// flag at most about (1 - q) of the observations, so starting at 0.90 keeps
// the flagged share of a contaminated window near the contamination rate
// instead of letting the calibration walk down to wholesale trimming.
const std::vector<double> DEFAULT_C_QUANTILE_LEVELS = {0.90, 0.95, 0.99};

std::vector<double> column_series(const Dataset& ds, const std::string& name) {
    if (name == "price" && !ds.price.empty()) return ds.price;
    if (name == "dividend" && !ds.dividend.empty()) return ds.dividend;
    if (name == "short_rate" && !ds.short_rate.empty()) return ds.short_rate;
    const auto it = ds.extra.find(name);
    if (it == ds.extra.end())
        throw DataError("regression spec: column '" + name + "' not in dataset");
    return it->second;
}

std::vector<double> default_c_grid(const TimeSeriesSample& window) {
    std::set<double> grid;
    for (double level : DEFAULT_C_QUANTILE_LEVELS) {
        const double c = choose_c(window, level).c;
        if (c > 0.0) grid.insert(c);
    }
    if (grid.empty())
        throw DegenerateFitError("run_test: no usable robustness bound");
    return {grid.begin(), grid.end()};
}

json ci_bound(double v) { return json_number(v); }

}  // namespace

AlignedSample build_regression_sample(const Dataset& dataset,
                                      const RegressionSpec& spec) {
    if (spec.predictors.empty())
        throw ConfigError("regression spec: at least one predictor required");
    const std::size_t n = dataset.size();
    AlignedSample out;

    if (!spec.response.empty()) {
        // Raw mode: response and predictors are used row-aligned as given.
        const std::vector<double> y = column_series(dataset, spec.response);
        Eigen::MatrixXd x(n, spec.predictors.size());
        for (std::size_t j = 0; j < spec.predictors.size(); ++j) {
            const std::vector<double> col = column_series(dataset, spec.predictors[j]);
            for (std::size_t t = 0; t < n; ++t) x(t, j) = col[t];
        }
        out.sample = TimeSeriesSample(
            Eigen::Map<const Eigen::VectorXd>(y.data(), n), std::move(x));
        out.dates = dataset.dates;
        return out;
    }

    const int k = spec.horizon;
    const std::vector<double> response = build_horizon_returns(dataset, k);
    const bool uses_yield =
        std::find(spec.predictors.begin(), spec.predictors.end(),
                  "dividend_yield") != spec.predictors.end();
    std::vector<double> yield;
    if (uses_yield) yield = build_dividend_yield(dataset);

    // Observation at period t: response over (t, t+k], predictors observed
    // at t. The dividend yield needs eleven periods of history, so the
    // usable range starts there when it participates.
    const std::size_t t0 = uses_yield ? 11 : 0;
    if (t0 + static_cast<std::size_t>(k) >= n)
        throw DataError("regression spec: series too short for the requested "
                        "horizon and predictor history");
    const std::size_t rows = n - k - t0;

    Eigen::VectorXd y(rows);
    Eigen::MatrixXd x(rows, spec.predictors.size());
    for (std::size_t j = 0; j < spec.predictors.size(); ++j) {
        if (spec.predictors[j] == "dividend_yield") {
            for (std::size_t i = 0; i < rows; ++i) x(i, j) = yield[t0 + i - 11];
        } else {
            const std::vector<double> col = column_series(dataset, spec.predictors[j]);
            for (std::size_t i = 0; i < rows; ++i) x(i, j) = col[t0 + i];
        }
    }
    for (std::size_t i = 0; i < rows; ++i) y(i) = response[t0 + i];
    out.sample = TimeSeriesSample(std::move(y), std::move(x));
    out.dates.assign(dataset.dates.begin() + t0, dataset.dates.begin() + t0 + rows);
    return out;
}

RunReport run_test(const Dataset& dataset, const RegressionSpec& spec,
                   const RunConfig& config) {
    if (!(config.level > 0.0 && config.level < 1.0))
        throw ConfigError("run_test: level must lie in (0, 1)");
    const AlignedSample aligned = build_regression_sample(dataset, spec);
    const int n = aligned.sample.n();
    const int width = config.window > 0 ? config.window : n;
    if (width > n)
        throw ConfigError("run_test: window wider than the usable sample");
    if (width < aligned.sample.k() + 2)
        throw ConfigError("run_test: window too small to fit the model");

    RunReport report;
    report.seed = config.seed;
    {
        json echo{{"horizon", spec.horizon},
                  {"predictors", spec.predictors},
                  {"response", spec.response},
                  {"level", config.level},
                  {"window", config.window},
                  {"scheme", config.scheme == Scheme::subsampling ? "subsampling"
                                                                  : "bootstrap"},
                  {"bootstrap_replications", config.bootstrap_replications},
                  {"inner_replications", config.inner_replications},
                  {"coverage_tolerance", config.coverage_tolerance},
                  {"m_override", config.m_override ? json(*config.m_override) : json()},
                  {"c_override", config.c_override ? json(*config.c_override) : json()}};
        report.config_echo = echo.dump();
    }

    for (int start = 0; start + width <= n; ++start) {
        const TimeSeriesSample win = aligned.sample.slice(start, width);
        const std::uint64_t window_seed = derive_seed(config.seed, start);
        WindowResult wr;
        wr.start_date = aligned.dates[start];
        wr.end_date = aligned.dates[start + width - 1];
        wr.n = width;

        CalibrationConfig cal;
        cal.target_level = config.level;
        cal.inner_replications = config.inner_replications;
        cal.coverage_tolerance = config.coverage_tolerance;
        cal.seed = window_seed;
        cal.resampling.scheme = config.scheme;
        cal.resampling.block_mode = config.block_mode;
        cal.resampling.replications = config.bootstrap_replications;
        cal.resampling.mode = Pipeline::fast_robust;
        cal.resampling.seed = derive_seed(window_seed, 1);

        // Block sizes first (one per pipeline, under the provisional
        // data-driven bound), then the robustness bound given the robust
        // block size.
        if (config.m_override) {
            wr.m = *config.m_override;
            wr.m_conventional = *config.m_override;
        } else {
            cal.m_grid = config.m_grid.empty()
                             ? default_block_grid(width, Pipeline::fast_robust)
                             : config.m_grid;
            cal.resampling.tuning_c = choose_c(win).c;
            const BlockSizeSelection sel = select_block_size(win, cal);
            wr.m = sel.m;
            wr.m_fallback = sel.fallback;

            CalibrationConfig conv_cal = cal;
            conv_cal.m_grid = config.m_grid.empty()
                                  ? default_block_grid(width, Pipeline::conventional)
                                  : config.m_grid;
            conv_cal.resampling.mode = Pipeline::conventional;
            const BlockSizeSelection conv_sel = select_block_size(win, conv_cal);
            wr.m_conventional = conv_sel.m;
            wr.m_conventional_fallback = conv_sel.fallback;
        }
        if (wr.m < 1 || wr.m > width || wr.m_conventional < 1 ||
            wr.m_conventional > width)
            throw ConfigError("run_test: block length outside [1, window]");
        cal.resampling.m = wr.m;

        if (config.c_override) {
            wr.c = *config.c_override;
        } else {
            cal.c_grid = config.c_grid.empty() ? default_c_grid(win)
                                               : config.c_grid;
            const RobustnessSelection sel = select_robustness(win, cal);
            wr.c = sel.c;
            wr.c_fallback = sel.fallback;
        }

        ResamplingConfig robust_rc = cal.resampling;
        robust_rc.tuning_c = wr.c;
        robust_rc.seed = derive_seed(window_seed, 2);
        ResamplingConfig conv_rc = robust_rc;
        conv_rc.mode = Pipeline::conventional;
        conv_rc.m = wr.m_conventional;

        const RobustFit rfit = huber_fit(win, wr.c);
        const RobustFit ofit = ols_fit(win);
        for (int j = 0; j < win.k(); ++j) {
            for (const bool robust : {true, false}) {
                const ResamplingConfig& rc = robust ? robust_rc : conv_rc;
                const RobustFit& fit = robust ? rfit : ofit;
                const TestResult res =
                    test_no_predictability(win, rc, 1.0 - config.level, j);
                CoefficientRow row;
                row.predictor = spec.predictors[j];
                row.method = robust ? "robust" : "conventional";
                row.estimate = fit.theta(j + 1);
                row.std_error = fit.std_errors(j + 1);
                row.ci_lo = res.ci.lo;
                row.ci_hi = res.ci.hi;
                row.broken_down = res.ci.broken_down;
                row.p_value = res.p_value;
                row.reject_5pct = res.p_value <= 0.05;
                row.reject_10pct = res.p_value <= 0.10;
                wr.coefficients.push_back(std::move(row));
            }
        }
        for (int t = 0; t < width; ++t) {
            wr.weights.push_back({aligned.dates[start + t], rfit.weights(t)});
            if (rfit.weights(t) < 1.0)
                wr.flagged.push_back({aligned.dates[start + t], rfit.weights(t)});
        }
        std::stable_sort(wr.flagged.begin(), wr.flagged.end(),
                         [](const WeightEntry& a, const WeightEntry& b) {
                             return a.weight < b.weight;
                         });
        report.windows.push_back(std::move(wr));
        if (config.window == 0) break;  // single full-sample window
    }
    return report;
}

json run_report_to_json(const RunReport& report) {
    json windows = json::array();
    for (const WindowResult& wr : report.windows) {
        json coeffs = json::array();
        for (const CoefficientRow& row : wr.coefficients)
            coeffs.push_back(json{{"predictor", row.predictor},
                                  {"method", row.method},
                                  {"estimate", json_number(row.estimate)},
                                  {"std_error", json_number(row.std_error)},
                                  {"ci_lo", ci_bound(row.ci_lo)},
                                  {"ci_hi", ci_bound(row.ci_hi)},
                                  {"broken_down", row.broken_down},
                                  {"p_value", json_number(row.p_value)},
                                  {"reject_5pct", row.reject_5pct},
                                  {"reject_10pct", row.reject_10pct}});
        json weights = json::array();
        for (const WeightEntry& we : wr.weights)
            weights.push_back(json{{"date", we.date}, {"weight", json_number(we.weight)}});
        json flagged = json::array();
        for (const WeightEntry& we : wr.flagged)
            flagged.push_back(json{{"date", we.date}, {"weight", json_number(we.weight)}});
        windows.push_back(json{{"start", wr.start_date},
                               {"end", wr.end_date},
                               {"n", wr.n},
                               {"m", wr.m},
                               {"m_fallback", wr.m_fallback},
                               {"m_conventional", wr.m_conventional},
                               {"m_conventional_fallback", wr.m_conventional_fallback},
                               {"c", json_number(wr.c)},
                               {"c_fallback", wr.c_fallback},
                               {"coefficients", coeffs},
                               {"weights", weights},
                               {"flagged", flagged}});
    }
    return json{{"schema_version", REPORT_SCHEMA_VERSION},
                {"study", "test"},
                {"provenance",
                 json{{"config", json::parse(report.config_echo.empty()
                                                 ? "{}"
                                                 : report.config_echo)},
                      {"seed", report.seed}}},
                {"windows", windows}};
}

std::string run_report_to_csv(const RunReport& report) {
    std::string out =
        "window_start,window_end,m,m_conventional,c,predictor,method,"
        "estimate,std_error,ci_lo,ci_hi,p_value,reject_5pct,reject_10pct,"
        "broken_down\n";
    for (const WindowResult& wr : report.windows)
        for (const CoefficientRow& row : wr.coefficients)
            out += csv_escape(wr.start_date) + ',' + csv_escape(wr.end_date) + ',' +
                   std::to_string(wr.m) + ',' + std::to_string(wr.m_conventional) +
                   ',' + format_double(wr.c) + ',' +
                   csv_escape(row.predictor) + ',' + row.method + ',' +
                   format_double(row.estimate) + ',' + format_double(row.std_error) +
                   ',' + format_double(row.ci_lo) + ',' + format_double(row.ci_hi) +
                   ',' + format_double(row.p_value) + ',' +
                   (row.reject_5pct ? "true" : "false") + ',' +
                   (row.reject_10pct ? "true" : "false") + ',' +
                   (row.broken_down ? "true" : "false") + '\n';
    return out;
}

void validate_run_report(const json& doc) {
    const auto require = [](bool ok, const std::string& what) {
        if (!ok) throw DataError("run report validation: " + what);
    };
    require(doc.is_object(), "document must be an object");
    require(doc.value("schema_version", -1) == REPORT_SCHEMA_VERSION,
            "schema_version missing or unsupported");
    require(doc.contains("provenance") && doc["provenance"].is_object(),
            "provenance missing");
    require(doc.contains("windows") && doc["windows"].is_array(),
            "windows missing or not an array");
    for (const json& w : doc["windows"]) {
        require(w.is_object() && w.contains("coefficients") &&
                    w["coefficients"].is_array() && w.contains("weights") &&
                    w["weights"].is_array() && w.contains("flagged") &&
                    w["flagged"].is_array(),
                "window entry malformed");
        for (const json& c : w["coefficients"]) {
            require(c.is_object() && c.contains("predictor") &&
                        c.contains("method") && c.contains("p_value") &&
                        c.contains("ci_lo") && c.contains("ci_hi"),
                    "coefficient entry malformed");
            require(!c["reject_5pct"].get<bool>() || c["reject_10pct"].get<bool>(),
                    "5% rejection without 10% rejection");
        }
    }
}

std::string sample_to_csv(const TimeSeriesSample& sample) {
    std::string out = "date,y";
    for (int j = 1; j <= sample.k(); ++j) out += ",x" + std::to_string(j);
    out += '\n';
    char date[16];
    for (int t = 0; t < sample.n(); ++t) {
        std::snprintf(date, sizeof(date), "t%06d", t + 1);
        out += date;
        out += ',' + format_double(sample.y(t));
        for (int j = 0; j < sample.k(); ++j)
            out += ',' + format_double(sample.x(t, j));
        out += '\n';
    }
    return out;
}

}  // namespace rpr
