#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <concepts>
#include <span>

#include "kcurves/kernel.hpp"
#include "kcurves/parallel.hpp"
#include "kcurves/point_cloud.hpp"

namespace kcurves {

/// Anything that evaluates a symmetric kernel between two points.
template <class K>
concept PairKernel = requires(const K& k, std::span<const double> x) {
    { k(x, x) } -> std::convertible_to<double>;
};

/// 𝕂_{μν} = K(x_μ, x_ν). The upper triangle is computed once and mirrored, rows are
/// distributed over workers; every entry is written by exactly one task.
template <PairKernel K>
Eigen::MatrixXd gram(const K& kernel, const PointCloud& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    if (!points.coords.allFinite()) throw DomainError("gram: non-finite coordinates");
    Eigen::MatrixXd g(n, n);
    const std::size_t workers = n < 256 ? 1 : worker_count();
    parallel_for(
        0, static_cast<std::size_t>(n),
        [&](std::size_t i) {
            const auto xi = points.row(i);
            for (Eigen::Index j = static_cast<Eigen::Index>(i); j < n; ++j) {
                const double v = kernel(xi, points.row(static_cast<std::size_t>(j)));
                g(static_cast<Eigen::Index>(i), j) = v;
                g(j, static_cast<Eigen::Index>(i)) = v;
            }
        },
        workers);
    return g;
}

/// Rectangular kernel matrix with entries K(a_i, b_j).
template <PairKernel K>
Eigen::MatrixXd cross_gram(const K& kernel, const PointCloud& a, const PointCloud& b) {
    const auto na = static_cast<Eigen::Index>(a.size());
    const auto nb = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXd g(na, nb);
    const std::size_t workers = na * nb < 65536 ? 1 : worker_count();
    parallel_for(
        0, static_cast<std::size_t>(na),
        [&](std::size_t i) {
            const auto xi = a.row(i);
            for (Eigen::Index j = 0; j < nb; ++j) g(static_cast<Eigen::Index>(i), j) = kernel(xi, b.row(j));
        },
        workers);
    return g;
}

/// Periodization of an isotropic kernel on the box [0, L)^d:
/// K_per(x, y) = sum over n in Z^d of K(|x - y + n L|), truncated once the kernel
/// has decayed below `tol` relative to its amplitude.
class PeriodizedKernel {
public:
    PeriodizedKernel(KernelSpec base, double period, double tol = 1e-18) : base_(base), period_(period) {
        base_.validate();
        if (!(period > 0.0)) throw DomainError("PeriodizedKernel: period must be positive");
        double r = base_.sigma;
        while (eval(base_, r) > tol * base_.amplitude) r *= 1.5;
        cutoff_ = r;
        images_ = static_cast<int>(std::ceil(cutoff_ / period_)) + 1;
    }

    [[nodiscard]] const KernelSpec& base() const { return base_; }
    [[nodiscard]] double period() const { return period_; }
    [[nodiscard]] int images() const { return images_; }

    double operator()(std::span<const double> x, std::span<const double> y) const {
        const std::size_t d = x.size();
        double disp[8];
        if (d > 8) throw SizeError("PeriodizedKernel supports d <= 8");
        for (std::size_t i = 0; i < d; ++i) {
            const double t = x[i] - y[i];
            disp[i] = t - period_ * std::round(t / period_);
        }
        // odometer over n in [-images, images]^d
        int idx[8];
        for (std::size_t i = 0; i < d; ++i) idx[i] = -images_;
        double total = 0.0;
        const double cut2 = cutoff_ * cutoff_;
        for (;;) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double t = disp[i] + idx[i] * period_;
                s += t * t;
            }
            if (s <= cut2) total += eval(base_, std::sqrt(s));
            std::size_t k = 0;
            while (k < d && ++idx[k] > images_) idx[k++] = -images_;
            if (k == d) break;
        }
        return total;
    }

private:
    KernelSpec base_;
    double period_;
    double cutoff_ = 0.0;
    int images_ = 0;
};

}  // namespace kcurves
