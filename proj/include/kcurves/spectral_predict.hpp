#pragma once

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/fitting.hpp"
#include "kcurves/learning_curve.hpp"
#include "kcurves/summation.hpp"

namespace kcurves {

/// Uncentered kernel PCA: K phi_rho = lambda_rho phi_rho (descending), q_rho = Z . phi_rho.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // columns
    Eigen::VectorXd projections;
};

inline SpectralDecomposition kernel_pca(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels) {
    const Eigen::Index n = gram.rows();
    if (gram.cols() != n) throw SizeError("kernel_pca: Gram matrix is not square");
    if (labels.size() != n) throw SizeError("kernel_pca: label count does not match Gram size");
    if (n == 0) throw SizeError("kernel_pca: empty Gram matrix");
    if (!gram.allFinite()) throw DomainError("kernel_pca: non-finite Gram entries");
    Eigen::MatrixXd v = gram;
    Eigen::VectorXd w(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n), v.data(),
                                           static_cast<lapack_int>(n), w.data());
    if (info != 0) throw NumericalError("kernel_pca: dsyevd failed with info " + std::to_string(info));
    SpectralDecomposition out;
    out.eigenvalues = w.reverse();
    out.eigenvectors = v.rowwise().reverse();
    out.projections = out.eigenvectors.transpose() * labels;
    return out;
}

/// Suffix sums  sum_{rho >= n} q_rho^2  (ranks are 1-based) at every n of `n_grid`.
inline LearningCurve tail_power_curve(const SpectralDecomposition& dec, std::span<const std::size_t> n_grid) {
    const auto nt = static_cast<std::size_t>(dec.projections.size());
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1 || n_grid[i] > nt) throw DomainError("tail_power_curve: n outside [1, n_tilde]");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw DomainError("tail_power_curve: n grid must be increasing");
    }
    std::vector<double> suffix(nt + 1, 0.0);
    CompensatedSum acc;
    for (std::size_t r = nt; r-- > 0;) {
        const double q = dec.projections(static_cast<Eigen::Index>(r));
        acc.add(q * q);
        suffix[r] = acc.value();
    }
    LearningCurve curve;
    for (std::size_t n : n_grid) curve.points.push_back({static_cast<double>(n), suffix[n - 1], 0.0, 1});
    return curve;
}

struct BetaEstimate {
    double beta = 0.0;  // a - 1, minus the fitted log-log slope of the tail sum
    ExponentFit fit;
};

/// Default window [n_tilde / 100, n_tilde / 10]. The suffix sum is cut off at n_tilde, which
/// bends the log-log curve downward as n approaches n_tilde; the power law is read off well below it.
inline FitWindow tail_window(const LearningCurve& curve) {
    double hi = 0.0;
    for (const auto& p : curve.points) hi = std::max(hi, p.n);
    return {hi / 100.0, hi / 10.0};
}

inline BetaEstimate beta_from_tail(const LearningCurve& curve, std::optional<FitWindow> window = std::nullopt) {
    const auto xs = curve.ns();
    const auto ys = curve.means();
    const ExponentFit fit = fit_power_law(xs, ys, window.value_or(tail_window(curve)));
    return {-fit.exponent, fit};
}

/// Mode spectrum and target weights for the self-consistent curve: E w_rho^2 = q_rho^2 / lambda_rho.
struct SpectralWeights {
    std::vector<double> lambda;
    std::vector<double> w2;
};

struct SelfConsistentPoint {
    double n = 0.0;
    double t = 0.0;
    double gamma = 0.0;
    double mse = 0.0;
};

/// Solves t = sum lambda / (1 + lambda n / t) and evaluates
///   E MSE = sum (w^2 / lambda) (1/lambda + n/t)^{-2} / (1 - n gamma / t^2),
///   gamma = sum lambda^2 / (1 + lambda n / t)^2.
inline SelfConsistentPoint selfconsistent_point(const SpectralWeights& sw, double n) {
    if (sw.lambda.size() != sw.w2.size()) throw SizeError("selfconsistent: lambda and w2 lengths differ");
    if (sw.lambda.empty()) throw SizeError("selfconsistent: empty spectrum");
    if (!(n >= 0.0) || !std::isfinite(n)) throw DomainError("selfconsistent: n must be finite and nonnegative");
    double total = 0.0;
    for (std::size_t i = 0; i < sw.lambda.size(); ++i) {
        if (!(sw.lambda[i] > 0.0) || !std::isfinite(sw.lambda[i])) throw DomainError("selfconsistent: eigenvalues must be positive");
        if (!(sw.w2[i] >= 0.0)) throw DomainError("selfconsistent: weights must be nonnegative");
        total += sw.lambda[i];
    }
    SelfConsistentPoint p;
    p.n = n;
    if (n == 0.0) {
        p.t = total;
        for (std::size_t i = 0; i < sw.lambda.size(); ++i) {
            p.gamma += sw.lambda[i] * sw.lambda[i];
            p.mse += sw.w2[i] * sw.lambda[i];
        }
        return p;
    }
    // h(t) = sum lambda / (t + lambda n) is decreasing; the fixed point is h(t) = 1
    auto h = [&](double t) {
        double s = 0.0;
        for (double l : sw.lambda) s += l / (t + l * n);
        return s;
    };
    if (!(static_cast<double>(sw.lambda.size()) > n))
        throw FormulaBreakdown("selfconsistent: no fixed point for n >= number of modes");
    double hi = total;
    double lo = total;
    for (int k = 0; h(lo) <= 1.0; ++k) {
        lo *= 0.5;
        if (k > 2000 || lo == 0.0) throw FormulaBreakdown("selfconsistent: fixed point below floating-point range");
    }
    for (int it = 0; it < 200 && hi > lo * (1.0 + 1e-12); ++it) {
        const double mid = std::sqrt(lo * hi);
        (h(mid) > 1.0 ? lo : hi) = mid;
    }
    const double t = std::sqrt(lo * hi);
    p.t = t;
    double ratio = 0.0;  // n gamma / t^2
    for (std::size_t i = 0; i < sw.lambda.size(); ++i) {
        const double l = sw.lambda[i];
        const double den = 1.0 + l * n / t;
        p.gamma += l * l / (den * den);
        const double u = t + l * n;
        ratio += n * l * l / (u * u);
    }
    const double denom = 1.0 - ratio;
    if (!(denom > 0.0)) throw FormulaBreakdown("selfconsistent: 1 - n gamma / t^2 <= 0");
    for (std::size_t i = 0; i < sw.lambda.size(); ++i) {
        const double l = sw.lambda[i];
        const double f = 1.0 / l + n / t;
        p.mse += sw.w2[i] / l / (f * f);
    }
    p.mse /= denom;
    return p;
}

inline LearningCurve selfconsistent_curve(const SpectralWeights& sw, std::span<const double> n_grid) {
    LearningCurve curve;
    for (double n : n_grid) curve.points.push_back({n, selfconsistent_point(sw, n).mse, 0.0, 1});
    return curve;
}

/// Eigenvalue-density exponent theta = 1 + d / alpha (1 for an infinite tail).
inline double density_exponent(double alpha, int d) { return 1.0 + d / alpha; }

/// Decay exponent q of E w^2 against lambda for a teacher of density exponent theta_T, measured
/// in the student's eigenbasis of density exponent theta.
inline double weight_exponent(double theta, double theta_t) {
    if (theta_t == 1.0) return std::numeric_limits<double>::infinity();
    return (theta - theta_t) / (theta_t - 1.0);
}

/// Large-n exponent (min(q - theta, 0) + 2) / (theta - 1).
/// The mode sums converge (finite teacher variance) exactly when q > theta - 2.
inline double asymptotic_exponent(double theta, double q) {
    if (!(theta > 1.0 && theta < 2.0)) throw DomainError("asymptotic_exponent: theta must lie in (1, 2)");
    if (std::isnan(q) || !(q > theta - 2.0)) throw DomainError("asymptotic_exponent: requires q > theta - 2");
    return (std::min(q - theta, 0.0) + 2.0) / (theta - 1.0);
}

}  // namespace kcurves
