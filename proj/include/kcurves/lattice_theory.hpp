#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/kernel.hpp"
#include "kcurves/star_sum.hpp"
#include "kcurves/summation.hpp"

namespace kcurves {

/// Per-frequency terms of the lattice MSE, in row-major DFT order of the m^d frequencies.
///
/// With T = K~_T, S = K~_S the summand is
///   T* - 2 [T S]* / S* + T* [S^2]* / (S*)^2,
/// evaluated from the central (n = 0) and image parts so that no two large quantities cancel:
///   T0 (S'^2 + SS') / S*^2 + T' (S'/S*)^2 + T' SS' / S*^2 + 2 (T' S0 - TS') / S*.
inline std::vector<double> lattice_mse_summands(const KernelSpec& teacher, const KernelSpec& student, int d, double L,
                                                std::size_t m, const StarSumConfig& cfg = {}) {
    teacher.validate();
    student.validate();
    if (d < 1) throw DomainError("lattice mse: d must be >= 1");
    const auto t = brillouin_star_sums(FourierProduct::single(teacher, d), L, m, cfg);
    const auto s = brillouin_star_sums(FourierProduct::single(student, d), L, m, cfg);
    const auto ss = brillouin_star_sums(FourierProduct::product(student, student, d), L, m, cfg);
    const auto ts = teacher == student ? ss : brillouin_star_sums(FourierProduct::product(teacher, student, d), L, m, cfg);

    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double t0 = t[i].central, tp = t[i].images;
        const double s0 = s[i].central, sp = s[i].images;
        const double star = s0 + sp;
        const double ssp = ss[i].images, tsp = ts[i].images;
        const double r = sp / star;
        out[i] = t0 * (r * r + ssp / (star * star)) + tp * r * r + tp * ssp / (star * star) +
                 2.0 * (tp * s0 - tsp) / star;
    }
    return out;
}

/// Expected test MSE of ridge-less regression with `student` on the m^d lattice of the periodic
/// box [0, L)^d when the data are a Gaussian field with covariance `teacher`:
/// L^{-d} times the sum of lattice_mse_summands over the Brillouin zone.
inline double exact_lattice_mse(const KernelSpec& teacher, const KernelSpec& student, int d, double L, std::size_t m,
                                const StarSumConfig& cfg = {}) {
    const auto terms = lattice_mse_summands(teacher, student, d, L, m, cfg);
    return pairwise_sum(terms) / std::pow(L, d);
}

/// Learning-curve exponent beta = min(alpha_T - d, 2 alpha_S) / d.
/// Returns +infinity when both tails are infinite (faster than any power law).
inline double theorem_beta(const SpectralTail& teacher, const SpectralTail& student, int d) {
    if (d < 1) throw DomainError("theorem_beta: d must be >= 1");
    if (!teacher.is_infinite() && !(teacher.alpha > d))
        throw DomainError("theorem_beta: alpha_T must exceed d");
    if (!student.is_infinite() && !(student.alpha > d))
        throw DomainError("theorem_beta: alpha_S must exceed d");
    const double a = teacher.alpha - d;  // inf stays inf
    const double b = 2.0 * student.alpha;
    return std::min(a, b) / d;
}

/// s = floor((alpha_T - d) / 2); std::nullopt stands for an infinitely smooth teacher.
inline std::optional<int> smoothness_index(const SpectralTail& teacher, int d) {
    if (d < 1) throw DomainError("smoothness_index: d must be >= 1");
    if (teacher.is_infinite()) return std::nullopt;
    if (!(teacher.alpha > d)) throw DomainError("smoothness_index: alpha_T must exceed d");
    return static_cast<int>(std::floor((teacher.alpha - d) / 2.0));
}

}  // namespace kcurves
