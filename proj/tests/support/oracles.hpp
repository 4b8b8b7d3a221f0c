#pragma once

// Independent reference computations used only by the tests. Each one takes a different
// numerical route from the library code it checks.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "kcurves/gram.hpp"
#include "kcurves/kernel.hpp"
#include "kcurves/point_cloud.hpp"
#include "kcurves/regression.hpp"

namespace oracle {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = z;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

struct WeightedPoints {
    kcurves::PointCloud points;
    std::vector<double> weights;
};

/// Quadrature over the lattice cell [0, delta]^d (d = 1 or 2) for integrands that are smooth
/// inside the cell but have cone singularities at its corners: d = 1 uses Gauss-Legendre, d = 2
/// splits the cell into four subsquares, each split into two triangles with a Duffy map that
/// collapses the singular corner.
inline WeightedPoints cell_quadrature(int d, double delta, int order) {
    const auto [gx, gw] = gauss_legendre(order);
    WeightedPoints out;
    std::vector<std::vector<double>> pts;
    if (d == 1) {
        for (int i = 0; i < order; ++i) {
            pts.push_back({0.5 * delta * (gx[static_cast<std::size_t>(i)] + 1.0)});
            out.weights.push_back(0.5 * delta * gw[static_cast<std::size_t>(i)]);
        }
    } else if (d == 2) {
        const double h = 0.5 * delta;
        // corner c of the cell and the unit vectors pointing into the cell from it
        const double corners[4][2] = {{0, 0}, {delta, 0}, {0, delta}, {delta, delta}};
        const double dirs[4][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
        for (int c = 0; c < 4; ++c) {
            for (int tri = 0; tri < 2; ++tri) {
                for (int i = 0; i < order; ++i) {
                    const double u = 0.5 * (gx[static_cast<std::size_t>(i)] + 1.0);
                    for (int j = 0; j < order; ++j) {
                        const double v = 0.5 * (gx[static_cast<std::size_t>(j)] + 1.0);
                        // triangle {0 <= b <= a <= 1} in local coordinates (a, b) = (u, u v), jacobian u
                        double a = u, b = u * v;
                        if (tri == 1) std::swap(a, b);
                        const double x = corners[c][0] + dirs[c][0] * h * a;
                        const double y = corners[c][1] + dirs[c][1] * h * b;
                        pts.push_back({x, y});
                        out.weights.push_back(h * h * u * 0.25 * gw[static_cast<std::size_t>(i)] * gw[static_cast<std::size_t>(j)]);
                    }
                }
            }
        }
    }
    kcurves::Coords c(static_cast<Eigen::Index>(pts.size()), d);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int k = 0; k < d; ++k) c(static_cast<Eigen::Index>(i), k) = pts[i][static_cast<std::size_t>(k)];
    out.points = kcurves::PointCloud{std::move(c), kcurves::Provenance::External, d, 0.0};
    return out;
}

/// Expected MSE on the periodic lattice from dense Gram matrices of image-summed kernels,
/// averaged continuously over one lattice cell.
inline double lattice_mse_by_gram(const kcurves::KernelSpec& teacher, const kcurves::KernelSpec& student, int d,
                                  double L, std::size_t m, int order = 24) {
    const kcurves::PeriodizedKernel kt(teacher, L, 1e-20);
    const kcurves::PeriodizedKernel ks(student, L, 1e-20);
    // lattice_points is library code; rebuild the grid here
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= m;
    kcurves::Coords c(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rest = i;
        for (int k = d - 1; k >= 0; --k) {
            c(static_cast<Eigen::Index>(i), k) = L * static_cast<double>(rest % m) / static_cast<double>(m);
            rest /= m;
        }
    }
    const kcurves::PointCloud train{std::move(c), kcurves::Provenance::Lattice, d, L};
    const auto cell = cell_quadrature(d, L / static_cast<double>(m), order);
    return kcurves::expected_mse_closed_form(kt, ks, train, cell.points, cell.weights);
}

/// Laplace star sum in d = 1 by brute force over |n| <= N, plus the integral of the remaining
/// images (midpoint rule in reverse): sum_{n > N} F(w + n s) ~ (1/s) int_{w + (N+1/2)s}^inf F.
inline double laplace_star_sum_1d(double sigma, double amplitude, double w, double delta, long N) {
    const double a2 = 1.0 / (sigma * sigma);
    const double c = amplitude * 2.0 / sigma;  // K~(w) = 2 A sigma^{-1} / (sigma^{-2} + w^2)
    const double s = 2.0 * std::numbers::pi / delta;
    double sum = 0.0;
    for (long n = N; n >= 1; --n) {
        const double up = w + s * static_cast<double>(n), dn = w - s * static_cast<double>(n);
        sum += c / (a2 + up * up) + c / (a2 + dn * dn);
    }
    sum += c / (a2 + w * w);
    const double a = std::sqrt(a2);
    auto tail = [&](double u0) { return c / a * (0.5 * std::numbers::pi - std::atan(u0 / a)) / s; };
    sum += tail(w + s * (N + 0.5)) + tail(-w + s * (N + 0.5));
    return sum;
}

/// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt by the trapezoid rule, which converges
/// geometrically for this analytic, doubly exponentially decaying integrand.
inline double bessel_k_quadrature(double nu, double z) {
    const double h = 1.0 / 256.0;
    double sum = 0.5 * std::exp(-z);
    for (int i = 1;; ++i) {
        const double t = i * h;
        const double v = std::exp(-z * std::cosh(t) + nu * t) * 0.5 * (1.0 + std::exp(-2.0 * nu * t));
        sum += v;
        if (v < 1e-300 || (t > 2.0 && v < 1e-18 * sum)) break;
    }
    return sum * h;
}

inline Eigen::MatrixXd naive_gram(const kcurves::KernelSpec& k, const kcurves::PointCloud& p) {
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (int t = 0; t < p.dim(); ++t) {
                const double diff = p.coords(i, t) - p.coords(j, t);
                s += diff * diff;
            }
            g(i, j) = kcurves::eval(k, std::sqrt(s));
        }
    return g;
}

/// Dense reference for the SVM dual  min (1/2) a'Qa - sum a  s.t. y'a = 0, 0 <= a <= C,
/// by accelerated projected gradient. The projection onto the box intersected with the
/// hyperplane is found by bisection on the multiplier of y'a = 0.
inline Eigen::VectorXd project_box_hyperplane(const Eigen::VectorXd& v, const Eigen::VectorXd& y, double C) {
    auto clip = [&](double mu) { return (v - mu * y).cwiseMax(0.0).cwiseMin(C).eval(); };
    double lo = -1.0, hi = 1.0;
    while (y.dot(clip(lo)) < 0.0) lo *= 2.0;
    while (y.dot(clip(hi)) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (y.dot(clip(mid)) > 0.0 ? lo : hi) = mid;
    }
    return clip(0.5 * (lo + hi));
}

inline double svm_reference_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double C,
                                      int iterations = 200000) {
    const Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(gram);
    const double lip = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    const double step = 1.0 / lip;
    const Eigen::Index n = y.size();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n), prev = a, z = a;
    double tk = 1.0;
    auto objective = [&](const Eigen::VectorXd& v) { return 0.5 * v.dot(q * v) - v.sum(); };
    double best = objective(a);
    for (int it = 0; it < iterations; ++it) {
        const Eigen::VectorXd grad = q * z - Eigen::VectorXd::Ones(n);
        a = project_box_hyperplane(z - step * grad, y, C);
        const double f = objective(a);
        if (f > best + 1e-15 * std::abs(best)) {  // restart momentum on increase
            tk = 1.0;
            z = a;
        } else {
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            z = a + ((tk - 1.0) / tn) * (a - prev);
            tk = tn;
        }
        best = std::min(best, f);
        if ((a - prev).norm() < 1e-13 * (1.0 + a.norm()) && it > 100) break;
        prev = a;
    }
    return best;
}

}  // namespace oracle
