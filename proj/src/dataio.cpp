#include "rpr/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace rpr {

namespace {

/// Splits one physical CSV line into fields, honoring double-quote quoting
/// and "" escapes. Embedded newlines inside quotes are not supported.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t row) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            if (!cur.empty())
                throw DataError("csv row " + std::to_string(row) +
                                ": quote inside unquoted field");
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted)
        throw DataError("csv row " + std::to_string(row) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& column) {
    const auto fail = [&](const char* what) {
        throw DataError("csv row " + std::to_string(row) + ", column '" + column +
                        "': " + what);
    };
    if (cell.empty()) fail("missing value");
    double value = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) fail("not a number");
    if (!std::isfinite(value)) fail("not finite");
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open csv file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty csv file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);  // UTF-8 byte-order mark

    const std::vector<std::string> header = split_csv_line(line, 1);
    {
        std::set<std::string> seen;
        for (const auto& h : header)
            if (!seen.insert(h).second)
                throw DataError("csv header: duplicate column '" + h + "'");
    }
    const auto column_of = [&](const std::string& name) -> int {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };

    const int date_col = column_of(schema.date);
    if (date_col < 0)
        throw DataError("csv header: required column '" + schema.date + "' missing");
    const int price_col = column_of(schema.price);
    const int dividend_col = column_of(schema.dividend);
    const int rate_col = column_of(schema.short_rate);
    if (schema.require_core && (price_col < 0 || dividend_col < 0 || rate_col < 0))
        throw DataError("csv header: required columns '" + schema.price + "', '" +
                        schema.dividend + "', '" + schema.short_rate +
                        "' must all be present");

    struct Row {
        std::string date;
        std::vector<double> values;  // indexed like header, date slot unused
    };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line, lineno);
        if (fields.size() != header.size())
            throw DataError("csv row " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        Row row;
        row.values.resize(header.size(), 0.0);
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (static_cast<int>(c) == date_col) {
                if (fields[c].empty())
                    throw DataError("csv row " + std::to_string(lineno) +
                                    ": missing date");
                row.date = fields[c];
            } else {
                row.values[c] = parse_cell(fields[c], lineno, header[c]);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("csv file has no data rows: " + path);

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].date == rows[i - 1].date)
            throw DataError("csv: duplicate date '" + rows[i].date + "'");

    Dataset ds;
    for (const auto& row : rows) ds.dates.push_back(row.date);
    const auto take = [&](int col) {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& row : rows) v.push_back(row.values[col]);
        return v;
    };
    if (price_col >= 0) ds.price = take(price_col);
    if (dividend_col >= 0) ds.dividend = take(dividend_col);
    if (rate_col >= 0) ds.short_rate = take(rate_col);
    for (std::size_t c = 0; c < header.size(); ++c) {
        const int ic = static_cast<int>(c);
        if (ic == date_col || ic == price_col || ic == dividend_col || ic == rate_col)
            continue;
        ds.extra[header[c]] = take(ic);
    }
    return ds;
}

std::vector<double> build_dividend_yield(const Dataset& dataset) {
    constexpr int WINDOW = 12;  // trailing periods aggregated into D_t
    const std::size_t n = dataset.size();
    if (dataset.price.size() != n || dataset.dividend.size() != n ||
        dataset.short_rate.size() != n)
        throw DataError("build_dividend_yield: price/dividend/short_rate required");
    if (n < WINDOW)
        throw DataError("build_dividend_yield: need at least 12 periods");

    std::vector<double> out;
    out.reserve(n - WINDOW + 1);
    for (std::size_t t = WINDOW - 1; t < n; ++t) {
        double total = 0.0;
        double gross = 1.0;  // (1+r_t)(1+r_{t-1})... built up term by term
        for (int j = 0; j < WINDOW; ++j) {
            total += gross * dataset.dividend[t - j];
            gross *= 1.0 + dataset.short_rate[t - j];
        }
        if (!(total > 0.0) || !(dataset.price[t] > 0.0))
            throw DataError("build_dividend_yield: nonpositive dividend sum or "
                            "price at date " + dataset.dates[t]);
        out.push_back(std::log(total / dataset.price[t]));
    }
    return out;
}

std::vector<double> build_horizon_returns(const Dataset& dataset, int k) {
    const std::size_t n = dataset.size();
    if (dataset.price.size() != n || dataset.dividend.size() != n)
        throw DataError("build_horizon_returns: price and dividend required");
    if (k < 1) throw ConfigError("build_horizon_returns: horizon must be >= 1");
    if (n < static_cast<std::size_t>(k) + 1)
        throw DataError("build_horizon_returns: series shorter than the horizon");

    std::vector<double> log_ret(n, 0.0);  // log_ret[t] = ln R_t, t >= 1
    for (std::size_t t = 1; t < n; ++t) {
        const double num = dataset.price[t] + dataset.dividend[t];
        if (!(num > 0.0) || !(dataset.price[t - 1] > 0.0))
            throw DataError("build_horizon_returns: nonpositive price at date " +
                            dataset.dates[t]);
        log_ret[t] = std::log(num / dataset.price[t - 1]);
    }

    std::vector<double> out;
    out.reserve(n - k);
    for (std::size_t t = 0; t + k < n; ++t) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += log_ret[t + j];
        out.push_back(acc / k);
    }
    return out;
}

}  // namespace rpr
