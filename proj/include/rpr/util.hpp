#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "rpr/errors.hpp"

namespace rpr {

/// Canonical number rendering shared by every emitter (CSV cells, config
/// keys, JSON strings), so identical inputs serialize byte-identically.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Left-continuous empirical quantile: the smallest value x with
/// P_hat(X <= x) >= t, i.e. the ceil(t*N)-th order statistic. `sorted` must
/// be ascending (+infinity entries, if any, last). The small slack guards
/// against t*N landing epsilon above an exact integer.
inline double empirical_quantile(const std::vector<double>& sorted, double t) {
    if (sorted.empty()) throw ConfigError("empirical_quantile: no draws");
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("empirical_quantile: t must lie in (0, 1)");
    const double pos = t * static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(pos - 1e-9));
    if (rank < 1) rank = 1;
    if (rank > sorted.size()) rank = sorted.size();
    return sorted[rank - 1];
}

}  // namespace rpr
