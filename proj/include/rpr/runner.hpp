#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpr/calibration.hpp"
#include "rpr/dataio.hpp"
#include "rpr/resampling.hpp"

namespace rpr {

/// What to regress on what. With `response` empty the response is the
/// horizon-averaged forward log market return built from prices and
/// dividends; otherwise it names a raw column used as-is. Predictors name
/// either the built-in "dividend_yield" construction or raw columns; raw
/// columns are taken at the observation date for constructed responses and
/// must be pre-aligned by the producer when the response is raw.
struct RegressionSpec {
    int horizon = 1;
    std::vector<std::string> predictors = {"dividend_yield"};
    std::string response;
};

struct RunConfig {
    double level = 0.90;  ///< confidence level of the reported intervals
    int window = 0;       ///< 0: single full-sample window; else rolling
                          ///< windows of this width advancing one period
    Scheme scheme = Scheme::subsampling;
    BlockMode block_mode = BlockMode::overlapping;
    int bootstrap_replications = 299;
    std::vector<int> m_grid;     ///< empty: per-pipeline default_block_grid
    std::vector<double> c_grid;  ///< empty: score quantiles of the window
    int inner_replications = 200;
    double coverage_tolerance = 0.03;
    std::optional<int> m_override;     ///< skip block-size calibration
    std::optional<double> c_override;  ///< skip robustness calibration
    std::uint64_t seed = 0;
};

struct CoefficientRow {
    std::string predictor;
    std::string method;  ///< "robust" or "conventional"
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool broken_down = false;
    double p_value = 1.0;
    bool reject_5pct = false;
    bool reject_10pct = false;
};

struct WeightEntry {
    std::string date;
    double weight = 1.0;
};

struct WindowResult {
    std::string start_date;
    std::string end_date;
    int n = 0;
    int m = 0;                 ///< robust-pipeline block length
    bool m_fallback = false;
    int m_conventional = 0;    ///< conventional-pipeline block length
    bool m_conventional_fallback = false;
    double c = 0.0;            ///< selected (or overridden) robustness bound
    bool c_fallback = false;
    std::vector<CoefficientRow> coefficients;
    std::vector<WeightEntry> weights;  ///< robust weight per observation
    std::vector<WeightEntry> flagged;  ///< weight < 1, ascending by weight
};

struct RunReport {
    std::string config_echo;  ///< canonical JSON echo of spec + run config
    std::uint64_t seed = 0;
    std::vector<WindowResult> windows;
};

/// Aligned regression sample built from a dataset per the spec, plus the
/// date label of each observation (the predictor observation date).
struct AlignedSample {
    TimeSeriesSample sample;
    std::vector<std::string> dates;
};
AlignedSample build_regression_sample(const Dataset& dataset,
                                      const RegressionSpec& spec);

/// Full predictive-regression run: builds the aligned sample, then per
/// window calibrates the block length of each pipeline and the robustness
/// bound c unless overridden, fits, tests every predictor with both the
/// robust and the conventional pipeline, and reports intervals, p-values,
/// 5%/10% rejections and the robust weight diagnostics.
RunReport run_test(const Dataset& dataset, const RegressionSpec& spec,
                   const RunConfig& config);

nlohmann::json run_report_to_json(const RunReport& report);
std::string run_report_to_csv(const RunReport& report);
void validate_run_report(const nlohmann::json& doc);

/// CSV rendering of a sample (synthetic zero-padded date labels, columns
/// y,x1..xk), loadable again through load_csv with require_core = false and
/// a raw-response regression spec.
std::string sample_to_csv(const TimeSeriesSample& sample);

}  // namespace rpr
