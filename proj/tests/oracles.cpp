#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rpr/errors.hpp"
#include "rpr/estimators.hpp"

namespace oracles {

Eigen::VectorXd brute_force_huber(const rpr::TimeSeriesSample& sample,
                                  double c) {
    const int p = sample.k() + 1;
    if (p != 2)
        throw std::runtime_error("brute_force_huber handles one predictor");
    const rpr::RobustFit ols = rpr::ols_fit(sample);
    double ca = ols.theta(0), cb = ols.theta(1);
    double half_a = 3.0 + 4.0 * std::abs(ols.std_errors(0));
    double half_b = 3.0 + 4.0 * std::abs(ols.std_errors(1));
    const int grid = 41;
    auto eval = [&](double a, double b) {
        Eigen::VectorXd theta(2);
        theta << a, b;
        return rpr::psi(sample, theta, c).norm();
    };
    for (int round = 0; round < 12; ++round) {
        double best = 1e300, best_a = ca, best_b = cb;
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                const double a = ca + half_a * (2.0 * i / (grid - 1) - 1.0);
                const double b = cb + half_b * (2.0 * j / (grid - 1) - 1.0);
                const double v = eval(a, b);
                if (v < best) {
                    best = v;
                    best_a = a;
                    best_b = b;
                }
            }
        ca = best_a;
        cb = best_b;
        half_a *= 0.35;
        half_b *= 0.35;
    }
    Eigen::VectorXd out(2);
    out << ca, cb;
    return out;
}

Eigen::MatrixXd fd_grad_psi(const rpr::TimeSeriesSample& sample,
                            const Eigen::VectorXd& theta, double c, double h) {
    const int p = static_cast<int>(theta.size());
    Eigen::MatrixXd jac(p, p);
    for (int j = 0; j < p; ++j) {
        Eigen::VectorXd up = theta, down = theta;
        up(j) += h;
        down(j) -= h;
        jac.col(j) = (rpr::psi(sample, up, c) - rpr::psi(sample, down, c)) /
                     (2.0 * h);
    }
    return jac;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    auto ranks = [&](const std::vector<double>& v) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](int i, int j) { return v[i] < v[j]; });
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i)
            r[idx[i]] = static_cast<double>(i);
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double mean = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ra[i] - mean) * (rb[i] - mean);
        da += (ra[i] - mean) * (ra[i] - mean);
        db += (rb[i] - mean) * (rb[i] - mean);
    }
    return num / std::sqrt(da * db);
}

BlockOracle refit_oracle(const rpr::TimeSeriesSample& sample, int m, double c,
                         int coef) {
    BlockOracle out;
    const rpr::RobustFit full = rpr::huber_fit(sample, c);
    const int p = sample.k() + 1;
    for (int start = 0; start + m <= sample.n(); ++start) {
        const rpr::TimeSeriesSample rep = sample.slice(start, m);
        Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(p, p);
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
        for (int t = 0; t < m; ++t) {
            const Eigen::VectorXd w = rep.design_row(t);
            const Eigen::VectorXd g = (rep.y(t) - w.dot(full.theta)) * w;
            const double norm = g.norm();
            const double hh = (norm == 0.0 || norm <= c) ? 1.0 : c / norm;
            score += g * hh;
            if (norm <= c)
                jac -= w * w.transpose();
            meat += (g * hh) * (g * hh).transpose();
        }
        score /= m;
        jac /= m;
        meat /= m;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> je(jac);
        if (je.eigenvalues().cwiseAbs().minCoeff() <=
            1e-12 * je.eigenvalues().cwiseAbs().maxCoeff())
            continue;
        const Eigen::MatrixXd jinv = je.eigenvectors() *
                                     je.eigenvalues().cwiseInverse().asDiagonal() *
                                     je.eigenvectors().transpose();
        const Eigen::MatrixXd sigma = jinv * meat * jinv.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(sigma);
        if (se.eigenvalues().minCoeff() <= 1e-12 * se.eigenvalues().maxCoeff())
            continue;
        const Eigen::MatrixXd sinv_half =
            se.eigenvectors() *
            se.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
            se.eigenvectors().transpose();
        rpr::RobustFit bf;
        try {
            bf = rpr::huber_fit(rep, c);
        } catch (const rpr::Error&) {
            continue;
        }
        const Eigen::VectorXd step = -(jinv * score);
        const double sm = std::sqrt(static_cast<double>(m));
        out.fast.push_back((sm * (sinv_half * step))(coef + 1));
        out.refit.push_back((sm * (sinv_half * (bf.theta - full.theta)))(coef + 1));
    }
    return out;
}

double binomial_upper_tail_exact(int lo, int trials, double q) {
    if (lo <= 0)
        return 1.0;
    if (lo > trials)
        return 0.0;
    long double total = 0.0L;
    for (int i = lo; i <= trials; ++i) {
        // C(trials, i) accumulated multiplicatively in long double.
        long double coef = 1.0L;
        for (int j = 1; j <= i; ++j)
            coef = coef * static_cast<long double>(trials - i + j) / j;
        total += coef * powl(static_cast<long double>(q), i) *
                 powl(1.0L - static_cast<long double>(q), trials - i);
    }
    return static_cast<double>(total);
}

}  // namespace oracles
