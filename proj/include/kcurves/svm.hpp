#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/gram.hpp"
#include "kcurves/point_cloud.hpp"

namespace kcurves {

struct SvmOptions {
    double C = 1e4;
    double tol = 1e-3;               // KKT tolerance on the maximal violating pair
    std::size_t max_updates_per_point = 100000;
    bool record_objective = false;   // keep the dual objective after every pair update
};

struct SvmModel {
    Eigen::VectorXd alphas;
    double bias = 0.0;
    double C = 0.0;
    std::vector<std::size_t> support;  // indices with a_mu > 0
    std::size_t iterations = 0;
    double kkt_gap = 0.0;              // final m(a) - M(a)
    std::vector<double> objective_trace;

    /// Dual objective  (1/2) a'Qa - sum a, as minimized by the solver.
    double objective = 0.0;
};

/// Decision value f(x_i) = sum_mu a_mu y_mu K(x_mu, x_i) + b for the training points.
inline Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels) {
    return gram * model.alphas.cwiseProduct(labels) + Eigen::VectorXd::Constant(gram.rows(), model.bias);
}

namespace detail {
inline double svm_dual_objective(const Eigen::VectorXd& a, const Eigen::VectorXd& grad) {
    // with G = Qa - 1:  (1/2) a'Qa - sum a = (1/2) sum a_i (G_i - 1)
    return 0.5 * a.dot(grad - Eigen::VectorXd::Ones(a.size()));
}
}  // namespace detail

/// Soft-margin SVM dual
///   min (1/2) a'Qa - sum a   s.t.  y'a = 0,  0 <= a <= C,   Q_ij = y_i y_j K_ij,
/// by sequential minimal optimization on the maximal violating pair.
inline SvmModel train_soft_margin(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels, const SvmOptions& opt = {}) {
    const Eigen::Index n = gram.rows();
    if (gram.cols() != n || labels.size() != n) throw SizeError("train_soft_margin: size mismatch");
    if (!(opt.C > 0.0)) throw DomainError("train_soft_margin: C must be positive");
    if (!(opt.tol > 0.0)) throw DomainError("train_soft_margin: tol must be positive");
    bool pos = false, neg = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels(i) == 1.0)
            pos = true;
        else if (labels(i) == -1.0)
            neg = true;
        else
            throw DomainError("train_soft_margin: labels must be +1 or -1");
    }
    if (!pos || !neg) throw DomainError("train_soft_margin: both classes must be present");

    const double C = opt.C;
    const Eigen::VectorXd& y = labels;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Constant(n, -1.0);  // gradient Qa - 1
    SvmModel model;
    model.C = C;
    const std::size_t cap = opt.max_updates_per_point * static_cast<std::size_t>(n);
    constexpr double tau = 1e-12;
    auto in_up = [&](Eigen::Index t) { return (y(t) > 0 && a(t) < C) || (y(t) < 0 && a(t) > 0); };
    auto in_low = [&](Eigen::Index t) { return (y(t) > 0 && a(t) > 0) || (y(t) < 0 && a(t) < C); };

    double gap = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    if (opt.record_objective) model.objective_trace.push_back(0.0);
    for (;; ++it) {
        // i maximizes -y G over I_up; j minimizes over I_low, second order choice as in LIBSVM
        Eigen::Index i = -1;
        double gmax = -std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t)
            if (in_up(t) && -y(t) * g(t) >= gmax) {
                gmax = -y(t) * g(t);
                i = t;
            }
        Eigen::Index j = -1;
        double gmin = std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double v = -y(t) * g(t);
            gmin = std::min(gmin, v);
            if (i >= 0 && v < gmax) {
                const double b = gmax - v;
                double quad = gram(i, i) + gram(t, t) - 2.0 * gram(i, t);
                if (quad <= 0.0) quad = tau;
                const double score = -(b * b) / quad;
                if (score <= best) {
                    best = score;
                    j = t;
                }
            }
        }
        gap = gmax - gmin;
        if (gap <= opt.tol || j < 0) break;
        if (it >= cap) throw ConvergenceError("train_soft_margin: iteration cap reached", gap);

        // move along y_i e_i - y_j e_j, which keeps y'a fixed
        double quad = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
        if (quad <= 0.0) quad = tau;
        double step = (-y(i) * g(i) + y(j) * g(j)) / quad;
        // box limits on the step t: a_i + y_i t in [0, C], a_j - y_j t in [0, C]
        const double lo_i = y(i) > 0 ? -a(i) : a(i) - C;
        const double hi_i = y(i) > 0 ? C - a(i) : a(i);
        const double lo_j = y(j) > 0 ? a(j) - C : -a(j);
        const double hi_j = y(j) > 0 ? a(j) : C - a(j);
        step = std::clamp(step, std::max(lo_i, lo_j), std::min(hi_i, hi_j));
        const double di = y(i) * step;
        const double dj = -y(j) * step;
        a(i) = std::clamp(a(i) + di, 0.0, C);
        a(j) = std::clamp(a(j) + dj, 0.0, C);
        // G += Q_{:,i} di + Q_{:,j} dj
        g += (y(i) * di) * y.cwiseProduct(gram.col(i)) + (y(j) * dj) * y.cwiseProduct(gram.col(j));
        if (opt.record_objective) model.objective_trace.push_back(detail::svm_dual_objective(a, g));
    }

    // bias from free support vectors: b = -y_i G_i; midpoint of the feasible interval otherwise
    double sum = 0.0;
    std::size_t free = 0;
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = -y(t) * g(t);
        if (a(t) > 0.0 && a(t) < C) {
            sum += yg;
            ++free;
        } else if (in_up(t)) {
            lb = std::max(lb, yg);
        } else {
            ub = std::min(ub, yg);
        }
    }
    // in_up without being free means a bound where -yG is a lower bound on b (and vice versa)
    model.bias = free > 0 ? sum / static_cast<double>(free) : 0.5 * (lb + ub);
    if (!std::isfinite(model.bias)) model.bias = std::isfinite(lb) ? lb : (std::isfinite(ub) ? ub : 0.0);
    model.alphas = std::move(a);
    for (Eigen::Index t = 0; t < n; ++t)
        if (model.alphas(t) > 0.0) model.support.push_back(static_cast<std::size_t>(t));
    model.iterations = it;
    model.kkt_gap = gap;
    model.objective = detail::svm_dual_objective(model.alphas, g);
    return model;
}

/// sign(sum_mu y_mu a_mu K(x_mu, x) + b) at every test point, with sign(0) = +1.
template <PairKernel K>
Eigen::VectorXd classify(const SvmModel& model, const K& kernel, const PointCloud& train, const Eigen::VectorXd& labels,
                         const PointCloud& test) {
    if (static_cast<Eigen::Index>(train.size()) != labels.size() || labels.size() != model.alphas.size())
        throw SizeError("classify: size mismatch");
    const Eigen::VectorXd ya = model.alphas.cwiseProduct(labels);
    Eigen::VectorXd f = cross_gram(kernel, test, train) * ya;
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = f(i) + model.bias >= 0.0 ? 1.0 : -1.0;
    return f;
}

/// Fraction of test points whose predicted sign disagrees with the truth.
inline double error_rate(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truths) {
    if (predicted.size() != truths.size()) throw SizeError("error_rate: length mismatch");
    if (predicted.size() == 0) throw SizeError("error_rate: empty input");
    Eigen::Index wrong = 0;
    for (Eigen::Index i = 0; i < predicted.size(); ++i)
        if (predicted(i) * truths(i) <= 0.0) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

}  // namespace kcurves
