#pragma once

#include <map>
#include <string>
#include <vector>

#include "rpr/errors.hpp"

namespace rpr {

/// A loaded market dataset, sorted by date. Core columns are price,
/// per-period dividend and short rate; any further numeric columns are kept
/// by name as extra predictor series.
struct Dataset {
    std::vector<std::string> dates;
    std::vector<double> price;
    std::vector<double> dividend;
    std::vector<double> short_rate;
    std::map<std::string, std::vector<double>> extra;

    std::size_t size() const { return dates.size(); }
};

/// Column-name mapping for load_csv. With require_core = false the price /
/// dividend / short-rate columns may be absent (every present column is
/// still loaded), which supports plain response/predictor files such as
/// simulated samples.
struct CsvSchema {
    std::string date = "date";
    std::string price = "price";
    std::string dividend = "dividend";
    std::string short_rate = "short_rate";
    bool require_core = true;
};

/// Strict RFC-4180-style CSV reader. Rows are sorted by date (ISO-style
/// lexicographic order is chronological); duplicate dates, ragged rows,
/// missing cells and non-numeric values raise DataError naming the row and
/// column.
Dataset load_csv(const std::string& path, const CsvSchema& schema = {});

/// Log dividend-price ratio with dividends aggregated over the trailing
/// twelve periods, reinvesting at the short rate:
///   D_t = d_t + (1+r_t) d_{t-1} + (1+r_t)(1+r_{t-1}) d_{t-2} + ...
///         + (1+r_t)...(1+r_{t-10}) d_{t-11},
/// yield_t = log(D_t / P_t). The first eleven periods have no full trailing
/// window and are dropped: the result has size() - 11 entries, entry i
/// belonging to period i + 11.
std::vector<double> build_dividend_yield(const Dataset& dataset);

/// k-period-ahead average log return: with ln R_t = log((P_t + d_t)/P_{t-1}),
/// entry i is (1/k) * sum_{j=1..k} ln R_{i+j}, i.e. the forward return over
/// (i, i+k] aligned to predictors observed at period i. The series has
/// size() - k entries.
std::vector<double> build_horizon_returns(const Dataset& dataset, int k);

}  // namespace rpr
