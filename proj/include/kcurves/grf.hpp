#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <random>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/fft.hpp"
#include "kcurves/geometry.hpp"
#include "kcurves/gram.hpp"
#include "kcurves/kernel.hpp"
#include "kcurves/linalg.hpp"
#include "kcurves/random.hpp"
#include "kcurves/star_sum.hpp"

namespace kcurves {

struct FieldSample {
    Eigen::VectorXd values;
    PointCloud points;
    KernelSpec teacher;
    double jitter = 0.0;  // diagonal jitter used by the joint factorization (0 for lattice synthesis)
};

/// L g with g i.i.d. standard normal, for a precomputed factor L L' = K.
inline Eigen::VectorXd sample_gaussian(const JitteredCholesky& chol, Rng& rng) {
    const Eigen::Index n = chol.llt.rows();
    std::normal_distribution<double> normal;
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = normal(rng);
    return chol.llt.matrixL() * g;
}

/// Teacher field jointly at arbitrary points: Z ~ N(0, K_T).
inline FieldSample sample_field(const KernelSpec& teacher, const PointCloud& points, std::uint64_t seed) {
    teacher.validate();
    const JitteredCholesky chol = jittered_cholesky(gram(teacher, points));
    Rng rng = make_rng(seed);
    return {sample_gaussian(chol, rng), points, teacher, chol.jitter};
}

/// Periodized teacher spectrum K~*(w) at the m^d frequencies of the box [0, L)^d (DFT order).
inline std::vector<double> lattice_spectrum(const KernelSpec& teacher, double L, std::size_t m, int d,
                                            const StarSumConfig& cfg = {}) {
    const auto sums = brillouin_star_sums(FourierProduct::single(teacher, d), L, m, cfg);
    std::vector<double> out(sums.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        out[i] = sums[i].total();
        peak = std::max(peak, out[i]);
    }
    for (double& v : out) {
        if (v < 0.0) {
            if (v < -1e-12 * peak) std::cerr << "kcurves: warning: negative periodized coefficient " << v << " clamped\n";
            v = 0.0;
        }
    }
    return out;
}

/// Teacher field on the m^d lattice of the periodic box [0, L)^d by Fourier synthesis:
/// Z(j) = L^{-d/2} sum_k c_k exp(2 pi i k.j / m) with E|c_k|^2 = K~*(w_k), c_{-k} = conj(c_k).
/// Values follow the row-major order of lattice_points(L, m, d).
inline FieldSample sample_field_lattice(const KernelSpec& teacher, double L, std::size_t m, int d, std::uint64_t seed,
                                        const StarSumConfig& cfg = {}) {
    teacher.validate();
    const auto spectrum = lattice_spectrum(teacher, L, m, d, cfg);
    const std::size_t total = spectrum.size();
    auto mirror = [&](std::size_t flat) {
        std::size_t out = 0, stride = 1;
        for (int k = 0; k < d; ++k) {
            const std::size_t j = flat % m;
            flat /= m;
            out += ((m - j) % m) * stride;
            stride *= m;
        }
        return out;
    };
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal;
    std::vector<std::complex<double>> c(total);
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t partner = mirror(i);
        if (partner < i) continue;
        if (partner == i) {
            c[i] = std::sqrt(spectrum[i]) * normal(rng);
        } else {
            const double s = std::sqrt(0.5 * spectrum[i]);
            const double re = normal(rng);
            const double im = normal(rng);
            c[i] = {s * re, s * im};
            c[partner] = std::conj(c[i]);
        }
    }
    dft_inplace(c, static_cast<int>(m), d, +1);
    const double scale = std::pow(L, -0.5 * d);
    Eigen::VectorXd values(static_cast<Eigen::Index>(total));
    double max_abs = 0.0, max_imag = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        values(static_cast<Eigen::Index>(i)) = scale * c[i].real();
        max_abs = std::max(max_abs, std::abs(c[i].real()));
        max_imag = std::max(max_imag, std::abs(c[i].imag()));
    }
    if (max_imag > 1e-10 * std::max(1.0, max_abs)) throw NumericalError("sample_field_lattice: synthesized field is not real");
    return {std::move(values), lattice_points(L, m, d), teacher, 0.0};
}

}  // namespace kcurves
