#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "kcurves/errors.hpp"
#include "kcurves/special_functions.hpp"

namespace kcurves {

enum class KernelFamily { Gaussian, Laplace, Matern };

inline std::string_view to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::Laplace: return "laplace";
        case KernelFamily::Matern: return "matern";
    }
    return "unknown";
}

inline KernelFamily family_from_string(std::string_view name) {
    if (name == "gaussian") return KernelFamily::Gaussian;
    if (name == "laplace") return KernelFamily::Laplace;
    if (name == "matern") return KernelFamily::Matern;
    throw DomainError("unknown kernel family '" + std::string(name) + "'");
}

/// Translation-invariant isotropic kernel K(r) with length-scale sigma and K(0) = amplitude.
///
///   Gaussian  amplitude * exp(-r^2 / (2 sigma^2))
///   Laplace   amplitude * exp(-r / sigma)
///   Matern    amplitude * 2^{1-nu} / Gamma(nu) * z^nu K_nu(z),  z = sqrt(2 nu) r / sigma
struct KernelSpec {
    KernelFamily family = KernelFamily::Laplace;
    double sigma = 1.0;
    double nu = 0.5;  // Matern only
    double amplitude = 1.0;

    static KernelSpec gaussian(double sigma, double amplitude = 1.0) {
        return {KernelFamily::Gaussian, sigma, 0.5, amplitude};
    }
    static KernelSpec laplace(double sigma, double amplitude = 1.0) {
        return {KernelFamily::Laplace, sigma, 0.5, amplitude};
    }
    static KernelSpec matern(double nu, double sigma, double amplitude = 1.0) {
        return {KernelFamily::Matern, sigma, nu, amplitude};
    }

    void validate() const {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("kernel sigma must be positive");
        if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw DomainError("kernel amplitude must be positive");
        if (family == KernelFamily::Matern && (!(nu > 0.0) || !std::isfinite(nu)))
            throw DomainError("Matern nu must be positive");
    }

    /// Kernel between two points of the embedding space (Euclidean distance).
    double operator()(std::span<const double> x, std::span<const double> y) const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// K(r) for r >= 0.
inline double eval(const KernelSpec& k, double r) {
    if (!std::isfinite(r) || r < 0.0) throw DomainError("kernel eval: distance must be finite and nonnegative");
    switch (k.family) {
        case KernelFamily::Gaussian: {
            const double u = r / k.sigma;
            return k.amplitude * std::exp(-0.5 * u * u);
        }
        case KernelFamily::Laplace: return k.amplitude * std::exp(-r / k.sigma);
        case KernelFamily::Matern: {
            const double z = std::sqrt(2.0 * k.nu) * r / k.sigma;
            // removable singularity at the origin
            if (z < 1e-8) return k.amplitude;
            const double log_val = (1.0 - k.nu) * std::numbers::ln2 - std::lgamma(k.nu) + k.nu * std::log(z) +
                                   special::log_bessel_k(k.nu, z);
            return std::min(k.amplitude, k.amplitude * std::exp(log_val));
        }
    }
    return 0.0;
}

inline double KernelSpec::operator()(std::span<const double> x, std::span<const double> y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        s += diff * diff;
    }
    return eval(*this, std::sqrt(s));
}

/// Spectral density of a Laplace or Matern kernel in d dimensions written as
/// C (a^2 + w^2)^{-power}. Laplace is the Matern kernel with nu = 1/2.
struct MaternSpectrum {
    double log_c;
    double a2;     // a^2 = 2 nu / sigma^2
    double power;  // nu + d/2

    [[nodiscard]] double operator()(double w) const { return std::exp(log_c - power * std::log(a2 + w * w)); }
};

inline bool has_matern_spectrum(const KernelSpec& k) { return k.family != KernelFamily::Gaussian; }

inline MaternSpectrum matern_spectrum(const KernelSpec& k, int d) {
    if (!has_matern_spectrum(k)) throw DomainError("Gaussian kernel has no Matern-form spectrum");
    const double nu = k.family == KernelFamily::Laplace ? 0.5 : k.nu;
    const double a2 = 2.0 * nu / (k.sigma * k.sigma);
    const double p = nu + 0.5 * d;
    const double log_c = std::log(k.amplitude) + d * std::log(2.0 * std::sqrt(std::numbers::pi)) + std::lgamma(p) +
                         nu * std::log(a2) - std::lgamma(nu);
    return {log_c, a2, p};
}

/// Radial Fourier transform  K~(|w|) = \int d^dx e^{-i w.x} K(|x|),  normalized so that
/// (2 pi)^{-d} \int d^dw K~(|w|) = K(0) = amplitude.
inline double fourier_radial(const KernelSpec& k, double w, int d) {
    if (d < 1) throw DomainError("fourier_radial: dimension must be >= 1");
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("fourier_radial: frequency must be finite and nonnegative");
    k.validate();
    if (k.family == KernelFamily::Gaussian) {
        const double s2 = k.sigma * k.sigma;
        return k.amplitude * std::pow(2.0 * std::numbers::pi * s2, 0.5 * d) * std::exp(-0.5 * s2 * w * w);
    }
    return matern_spectrum(k, d)(w);
}

/// High-frequency decay exponent alpha of K~(w) ~ c |w|^{-alpha}. Infinite for the Gaussian.
struct SpectralTail {
    double alpha = std::numeric_limits<double>::infinity();
    bool prefactor_known = false;

    [[nodiscard]] bool is_infinite() const { return std::isinf(alpha); }

    static SpectralTail infinite() { return {}; }
    static SpectralTail power_law(double alpha) { return {alpha, true}; }
};

inline SpectralTail spectral_exponent(const KernelSpec& k, int d) {
    if (d < 1) throw DomainError("spectral_exponent: dimension must be >= 1");
    switch (k.family) {
        case KernelFamily::Gaussian: return SpectralTail::infinite();
        case KernelFamily::Laplace: return SpectralTail::power_law(d + 1.0);
        case KernelFamily::Matern: return SpectralTail::power_law(d + 2.0 * k.nu);
    }
    return SpectralTail::infinite();
}

}  // namespace kcurves
