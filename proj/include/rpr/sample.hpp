#pragma once

#include <Eigen/Dense>

#include "rpr/errors.hpp"

namespace rpr {

/// A predictive-regression sample. Observation t (0-based row t) pairs the
/// response y_t with the predictor vector observed one period earlier, so a
/// fit of y on x is always a regression on lagged predictors; the alignment
/// is the producer's responsibility and is preserved verbatim by block
/// resampling.
struct TimeSeriesSample {
    Eigen::VectorXd y;  ///< responses, length n
    Eigen::MatrixXd x;  ///< lagged predictors, n rows, k columns

    TimeSeriesSample() = default;
    TimeSeriesSample(Eigen::VectorXd y_in, Eigen::MatrixXd x_in)
        : y(std::move(y_in)), x(std::move(x_in)) {
        if (y.size() != x.rows())
            throw ConfigError("sample: response length does not match predictor rows");
        if (y.size() == 0)
            throw ConfigError("sample: empty");
    }

    int n() const { return static_cast<int>(y.size()); }
    int k() const { return static_cast<int>(x.cols()); }

    /// Contiguous sub-sample of `len` observations starting at `start`.
    TimeSeriesSample slice(int start, int len) const {
        if (start < 0 || len <= 0 || start + len > n())
            throw ConfigError("sample slice: range out of bounds");
        return TimeSeriesSample(y.segment(start, len), x.middleRows(start, len));
    }

    /// Design row for observation t: (1, x_t')'.
    Eigen::VectorXd design_row(int t) const {
        Eigen::VectorXd w(k() + 1);
        w(0) = 1.0;
        w.tail(k()) = x.row(t).transpose();
        return w;
    }
};

}  // namespace rpr
