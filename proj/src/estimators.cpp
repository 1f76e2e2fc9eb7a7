#include "rpr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rpr/util.hpp"

namespace rpr {

namespace {

constexpr double CHOOSE_C_FLOOR = 1e-8;

Eigen::MatrixXd design_matrix(const TimeSeriesSample& s) {
    Eigen::MatrixXd w(s.n(), s.k() + 1);
    w.col(0).setOnes();
    w.rightCols(s.k()) = s.x;
    return w;
}

/// Inverts a symmetric matrix by eigendecomposition, throwing `Thrown` when
/// the smallest |eigenvalue| falls under the relative cutoff.
template <class Thrown>
Eigen::MatrixXd invert_symmetric(const Eigen::MatrixXd& a, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (!(top > 0.0) || ev.cwiseAbs().minCoeff() <= SINGULARITY_TOLERANCE * top)
        throw Thrown(what);
    return eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

void check_c(double c) {
    if (!(c > 0.0)) throw ConfigError("huber bound c must be positive (or +infinity)");
}

double weight_at(double score_norm, double c) {
    if (score_norm == 0.0 || score_norm <= c) return 1.0;
    return c / score_norm;
}

/// Change in the convex merit objective when moving from `theta` to
/// `theta + lambda * direction`. The objective is a per-observation Huber
/// loss with observation-specific threshold c / ||w_t|| (clipping happens
/// exactly when ||g|| > c), whose stationary points are the roots of psi.
/// Each observation's change is evaluated in product form so the result
/// stays accurate even when the objective itself is dominated by a large
/// constant contribution from gross outliers.
double objective_delta(const TimeSeriesSample& s, const Eigen::MatrixXd& w,
                       const Eigen::VectorXd& resid,
                       const Eigen::VectorXd& step_resid_change,
                       double lambda, double c) {
    double total = 0.0;
    for (int t = 0; t < s.n(); ++t) {
        const double a = resid(t);
        const double b = a - lambda * step_resid_change(t);
        const double cut = c / w.row(t).norm();
        const double aa = std::abs(a), ab = std::abs(b);
        double dl;
        if (aa <= cut && ab <= cut)
            dl = 0.5 * (b - a) * (b + a);
        else if (aa > cut && ab > cut)
            dl = cut * (b - a) * (b + a) / (aa + ab);
        else if (aa <= cut)  // leaves the quadratic region
            dl = cut * (ab - cut) + 0.5 * (cut - aa) * (cut + aa);
        else  // enters the quadratic region
            dl = -(cut * (aa - cut) + 0.5 * (cut - ab) * (cut + ab));
        total += dl;
    }
    return total / s.n();
}

/// Weights, sandwich covariance, standard errors and t-statistics at theta.
/// Shared by ols_fit (c = +infinity) and huber_fit.
void finish_fit(const TimeSeriesSample& s, const Eigen::MatrixXd& w, double c,
                RobustFit& fit) {
    const int n = s.n();
    const int p = s.k() + 1;
    const Eigen::VectorXd resid = s.y - w * fit.theta;

    fit.weights.resize(n);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(p, p);   // grad_psi at theta
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);  // avg g g' h^2
    for (int t = 0; t < n; ++t) {
        const Eigen::VectorXd wr = w.row(t).transpose();
        const Eigen::VectorXd g = resid(t) * wr;
        const double h = weight_at(g.norm(), c);
        fit.weights(t) = h;
        if (g.norm() <= c) jac.noalias() -= wr * wr.transpose();
        const Eigen::VectorXd gh = g * h;
        meat.noalias() += gh * gh.transpose();
    }
    jac /= n;
    meat /= n;

    const Eigen::MatrixXd jinv = invert_symmetric<DegenerateFitError>(
        jac, "sandwich covariance: singular estimating-equation Jacobian");
    fit.covariance = jinv * meat * jinv.transpose();

    fit.std_errors.resize(p);
    fit.t_stats.resize(p);
    for (int j = 0; j < p; ++j) {
        const double var = std::max(fit.covariance(j, j), 0.0);
        fit.std_errors(j) = std::sqrt(var / n);
        if (fit.std_errors(j) > 0.0)
            fit.t_stats(j) = fit.theta(j) / fit.std_errors(j);
        else
            fit.t_stats(j) = fit.theta(j) == 0.0
                                 ? 0.0
                                 : std::copysign(
                                       std::numeric_limits<double>::infinity(),
                                       fit.theta(j));
    }
    fit.tuning_c = c;
}

Eigen::VectorXd ols_theta(const TimeSeriesSample& s, const Eigen::MatrixXd& w) {
    const Eigen::MatrixXd gram = w.transpose() * w;
    const Eigen::MatrixXd ginv = invert_symmetric<SingularDesignError>(
        gram, "ols_fit: rank-deficient design");
    return ginv * (w.transpose() * s.y);
}

}  // namespace

RobustFit ols_fit(const TimeSeriesSample& sample) {
    if (sample.n() < sample.k() + 1)
        throw SingularDesignError("ols_fit: fewer observations than parameters");
    const Eigen::MatrixXd w = design_matrix(sample);
    RobustFit fit;
    fit.theta = ols_theta(sample, w);
    fit.iterations = 0;
    fit.converged = true;
    finish_fit(sample, w, std::numeric_limits<double>::infinity(), fit);
    return fit;
}

Eigen::VectorXd psi(const TimeSeriesSample& sample, const Eigen::VectorXd& theta,
                    double c) {
    check_c(c);
    if (theta.size() != sample.k() + 1)
        throw ConfigError("psi: theta length does not match the design");
    const Eigen::VectorXd resid = sample.y - design_matrix(sample) * theta;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(theta.size());
    for (int t = 0; t < sample.n(); ++t) {
        const Eigen::VectorXd g = resid(t) * sample.design_row(t);
        acc += g * weight_at(g.norm(), c);
    }
    return acc / sample.n();
}

Eigen::MatrixXd grad_psi(const TimeSeriesSample& sample,
                         const Eigen::VectorXd& theta, double c) {
    check_c(c);
    if (theta.size() != sample.k() + 1)
        throw ConfigError("grad_psi: theta length does not match the design");
    const Eigen::VectorXd resid = sample.y - design_matrix(sample) * theta;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(theta.size(), theta.size());
    for (int t = 0; t < sample.n(); ++t) {
        const Eigen::VectorXd wr = sample.design_row(t);
        if ((resid(t) * wr).norm() <= c) jac.noalias() -= wr * wr.transpose();
    }
    return jac / sample.n();
}

RobustFit huber_fit(const TimeSeriesSample& sample, double c,
                    const HuberOptions& options) {
    check_c(c);
    if (options.tol <= 0.0 || options.max_iter < 1)
        throw ConfigError("huber_fit: invalid options");
    const Eigen::MatrixXd w = design_matrix(sample);

    Eigen::VectorXd theta = ols_theta(sample, w);  // may throw SingularDesignError
    double psi_norm = psi(sample, theta, c).norm();

    RobustFit fit;
    fit.iterations = 0;
    while (psi_norm > options.tol) {
        if (fit.iterations >= options.max_iter)
            throw ConvergenceError(
                "huber_fit: no convergence after max_iter iterations",
                std::vector<double>(theta.data(), theta.data() + theta.size()));
        ++fit.iterations;

        // One reweighted least-squares step: solve the normal equations with
        // the weights frozen at the current iterate.
        const Eigen::VectorXd resid = sample.y - w * theta;
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(theta.size(), theta.size());
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(theta.size());
        for (int t = 0; t < sample.n(); ++t) {
            const Eigen::VectorXd wr = w.row(t).transpose();
            const double h = weight_at((resid(t) * wr).norm(), c);
            gram.noalias() += h * wr * wr.transpose();
            rhs += h * sample.y(t) * wr;
        }
        const Eigen::MatrixXd ginv = invert_symmetric<SingularDesignError>(
            gram, "huber_fit: rank-deficient weighted design");
        const Eigen::VectorXd direction = ginv * rhs - theta;

        // The IRLS step is a descent direction for the convex merit
        // objective, so halving the step until that objective strictly
        // decreases rules out the cycling that full steps can produce once
        // scores sit near the bound. ||psi|| itself is not monotone along
        // the step, hence the separate merit.
        const Eigen::VectorXd resid_change = w * direction;
        double lambda = 1.0;
        while (!(objective_delta(sample, w, resid, resid_change, lambda, c) <
                 0.0)) {
            lambda *= 0.5;
            if (lambda < 1e-12)
                throw ConvergenceError(
                    "huber_fit: stalled (no descent step at the current iterate)",
                    std::vector<double>(theta.data(),
                                        theta.data() + theta.size()));
        }
        theta += lambda * direction;
        psi_norm = psi(sample, theta, c).norm();
    }

    fit.theta = theta;
    fit.converged = true;
    finish_fit(sample, w, c, fit);
    return fit;
}

TuningSelection choose_c(const TimeSeriesSample& sample, double quantile_level) {
    if (!(quantile_level > 0.0 && quantile_level < 1.0))
        throw ConfigError("choose_c: quantile_level must lie in (0, 1)");
    const RobustFit ols = ols_fit(sample);
    std::vector<double> norms(sample.n());
    for (int t = 0; t < sample.n(); ++t) {
        const Eigen::VectorXd wr = sample.design_row(t);
        norms[t] = std::abs(sample.y(t) - wr.dot(ols.theta)) * wr.norm();
    }
    std::sort(norms.begin(), norms.end());
    TuningSelection sel;
    sel.c = empirical_quantile(norms, quantile_level);
    if (sel.c < CHOOSE_C_FLOOR) {
        sel.c = CHOOSE_C_FLOOR;
        sel.floored = true;
    }
    return sel;
}

}  // namespace rpr
