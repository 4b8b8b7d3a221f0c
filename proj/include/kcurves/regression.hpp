#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <span>

#include "kcurves/errors.hpp"
#include "kcurves/gram.hpp"
#include "kcurves/linalg.hpp"
#include "kcurves/point_cloud.hpp"

namespace kcurves {

struct Interpolant {
    Eigen::VectorXd coefficients;
    double jitter = 0.0;  // diagonal jitter the factorization needed
};

/// Coefficients a solving (K + ridge I) a = labels.
inline Interpolant solve_interpolant(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels, double ridge = 0.0) {
    if (gram.rows() != gram.cols()) throw SizeError("solve_interpolant: Gram matrix is not square");
    if (gram.rows() != labels.size()) throw SizeError("solve_interpolant: label count does not match Gram size");
    const JitteredCholesky chol = jittered_cholesky(gram, ridge);
    if (gram.rows() == 0) return {Eigen::VectorXd(0), 0.0};
    return {chol.llt.solve(labels), chol.jitter};
}

/// Z^(x) = sum_mu a_mu K(x_mu, x) at every test point.
template <PairKernel K>
Eigen::VectorXd predict(const K& kernel, const PointCloud& train, const Eigen::VectorXd& a, const PointCloud& test) {
    if (static_cast<Eigen::Index>(train.size()) != a.size()) throw SizeError("predict: coefficient count mismatch");
    if (train.size() > 0 && test.size() > 0 && train.dim() != test.dim())
        throw SizeError("predict: train and test dimensions differ");
    return cross_gram(kernel, test, train) * a;
}

inline double empirical_mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truths) {
    if (predictions.size() != truths.size()) throw SizeError("empirical_mse: length mismatch");
    if (predictions.size() == 0) throw SizeError("empirical_mse: empty input");
    return (predictions - truths).squaredNorm() / static_cast<double>(predictions.size());
}

/// E over teacher fields of the (weighted) test MSE of the student's interpolant:
///   K_T(x,x) - 2 k_S(x)' K_S^{-1} k_T(x) + k_S(x)' K_S^{-1} K_T K_S^{-1} k_S(x),
/// averaged over test points with `weights` (uniform when empty; weights are normalized).
template <PairKernel KT, PairKernel KS>
double expected_mse_closed_form(const KT& teacher, const KS& student, const PointCloud& train, const PointCloud& test,
                                std::span<const double> weights = {}) {
    const auto nt = static_cast<Eigen::Index>(test.size());
    if (nt == 0) throw SizeError("expected_mse_closed_form: empty test set");
    if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != nt)
        throw SizeError("expected_mse_closed_form: weight count mismatch");
    Eigen::VectorXd w = Eigen::VectorXd::Constant(nt, 1.0 / static_cast<double>(nt));
    if (!weights.empty()) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < nt; ++i) {
            if (!(weights[static_cast<std::size_t>(i)] >= 0.0)) throw DomainError("expected_mse_closed_form: negative weight");
            w(i) = weights[static_cast<std::size_t>(i)];
            total += w(i);
        }
        if (!(total > 0.0)) throw DomainError("expected_mse_closed_form: weights sum to zero");
        w /= total;
    }
    Eigen::VectorXd prior(nt);
    for (Eigen::Index i = 0; i < nt; ++i) prior(i) = teacher(test.row(static_cast<std::size_t>(i)), test.row(static_cast<std::size_t>(i)));
    if (train.size() == 0) return w.dot(prior);

    const Eigen::MatrixXd ks = gram(student, train);
    const Eigen::MatrixXd kt = gram(teacher, train);
    const Eigen::MatrixXd ks_x = cross_gram(student, train, test);  // n x nt
    const Eigen::MatrixXd kt_x = cross_gram(teacher, train, test);
    const JitteredCholesky chol = jittered_cholesky(ks);
    const Eigen::MatrixXd b = chol.llt.solve(ks_x);  // K_S^{-1} k_S(x)
    const Eigen::VectorXd cross = (b.array() * kt_x.array()).colwise().sum().transpose();
    const Eigen::VectorXd quad = (b.array() * (kt * b).array()).colwise().sum().transpose();
    return w.dot(prior - 2.0 * cross + quad);
}

}  // namespace kcurves
