#pragma once

#include <cmath>
#include <numbers>

#include "kcurves/errors.hpp"

namespace kcurves::special {

namespace detail {

// Hankel asymptotic series  K_mu(z) ~ sqrt(pi/2z) e^{-z} * sum_k a_k(mu) / z^k,
// returns the sum. Accurate to machine precision for z > 30 and mu < 2.
inline double hankel_series(double mu, double z) {
    const double four_mu2 = 4.0 * mu * mu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * (four_mu2 - odd * odd) / (k * 8.0 * z);
        if (std::abs(next) > std::abs(term)) break;  // asymptotic series started diverging
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace detail

/// log K_nu(z), the modified Bessel function of the second kind, for z > 0.
///
/// The fractional part mu of |nu| is evaluated directly (closed form at mu = 1/2,
/// std::cyl_bessel_k for z <= 30, Hankel asymptotics beyond), then the integer part
/// is reached by upward recurrence on the ratio K_{o+1}/K_o, which is stable and never
/// forms K_nu itself, so large orders at small z do not overflow.
inline double log_bessel_k(double nu, double z) {
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("log_bessel_k: z must be positive and finite");
    if (!std::isfinite(nu)) throw DomainError("log_bessel_k: order must be finite");
    nu = std::abs(nu);
    const double whole = std::floor(nu);
    const double mu = nu - whole;

    double log_k;  // log K_mu(z)
    double ratio;  // K_{mu+1}(z) / K_mu(z)
    if (std::abs(mu - 0.5) < 1e-15) {
        log_k = 0.5 * std::log(std::numbers::pi / (2.0 * z)) - z;
        ratio = 1.0 + 1.0 / z;
    } else if (z <= 30.0) {
        const double k0 = std::cyl_bessel_k(mu, z);
        const double k1 = std::cyl_bessel_k(mu + 1.0, z);
        log_k = std::log(k0);
        ratio = k1 / k0;
    } else {
        const double s0 = detail::hankel_series(mu, z);
        const double s1 = detail::hankel_series(mu + 1.0, z);
        log_k = 0.5 * std::log(std::numbers::pi / (2.0 * z)) - z + std::log(s0);
        ratio = s1 / s0;
    }

    const int steps = static_cast<int>(whole);
    for (int i = 0; i < steps; ++i) {
        const double order = mu + i;
        log_k += std::log(ratio);
        ratio = 1.0 / ratio + 2.0 * (order + 1.0) / z;
    }
    return log_k;
}

}  // namespace kcurves::special
