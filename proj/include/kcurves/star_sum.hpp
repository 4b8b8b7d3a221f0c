#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/fft.hpp"
#include "kcurves/kernel.hpp"
#include "kcurves/special_functions.hpp"
#include "kcurves/summation.hpp"

namespace kcurves {

/// How a lattice-frequency image sum F*(w) = sum_n F(w + 2 pi n / delta) is evaluated.
///  Frequency: direct sum over image shells, used when a Gaussian factor makes images decay fast.
///  RealSpace: Poisson dual  delta^d sum_{x in delta Z^d} f(|x|) cos(w.x)  with f the inverse
///             transform of F, available for products of Laplace/Matern spectra.
enum class StarSumRoute { Auto, Frequency, RealSpace };

struct StarSumConfig {
    int truncation = 3;       // minimum image radius N of the frequency route
    int max_truncation = 64;  // N_max; not reaching rel_tol there is a PrecisionError
    double rel_tol = 1e-14;
    StarSumRoute route = StarSumRoute::Auto;
};

/// F* split into the n = 0 term and the sum over the other images.
struct ImageSum {
    double central = 0.0;
    double images = 0.0;

    [[nodiscard]] double total() const { return central + images; }
};

/// Radial integrand made of one kernel transform or the product of two.
struct FourierProduct {
    KernelSpec first;
    std::optional<KernelSpec> second;
    int d = 1;

    static FourierProduct single(const KernelSpec& k, int d) { return {k, std::nullopt, d}; }
    static FourierProduct product(const KernelSpec& a, const KernelSpec& b, int d) { return {a, b, d}; }

    [[nodiscard]] bool has_gaussian_factor() const {
        return first.family == KernelFamily::Gaussian || (second && second->family == KernelFamily::Gaussian);
    }
    [[nodiscard]] double operator()(double w) const {
        double v = fourier_radial(first, w, d);
        if (second) v *= fourier_radial(*second, w, d);
        return v;
    }
};

namespace detail {

inline double sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d); }

/// Inverse d-dimensional Fourier transform of
///   C1 (a1^2 + w^2)^{-p1} * C2 (a2^2 + w^2)^{-p2},   a1 >= a2,
/// as a positive series  sum_j b_j D^j g_{P+j}(r)  with u = a1^2 + w^2, D = a1^2 - a2^2, P = p1 + p2,
/// b_j = binom(p2 + j - 1, j), and g_Q the Matern-form inverse of u^{-Q}.
class MaternProductInverse {
public:
    explicit MaternProductInverse(const FourierProduct& f) : d_(f.d) {
        const MaternSpectrum s1 = matern_spectrum(f.first, f.d);
        if (!f.second) {
            init(s1.log_c, s1.a2, s1.power, s1.a2, 0.0);
            return;
        }
        const MaternSpectrum s2 = matern_spectrum(*f.second, f.d);
        const double log_c = s1.log_c + s2.log_c;
        if (s1.a2 >= s2.a2)
            init(log_c, s1.a2, s1.power, s2.a2, s2.power);
        else
            init(log_c, s2.a2, s2.power, s1.a2, s1.power);
    }

    /// Exponential decay rate of f(r) at large r.
    [[nodiscard]] double decay_rate() const { return std::sqrt(a2_min_); }

    double operator()(double r) const {
        const double dd = d_;
        if (r == 0.0) {
            // g_Q(0) = Gamma(nu) / ((4 pi)^{d/2} Gamma(Q) A^{2 nu}),  nu = Q - d/2
            double log_t = log_c_ + std::lgamma(nu0_) - 0.5 * dd * std::log(4.0 * std::numbers::pi) - std::lgamma(p_) -
                           nu0_ * std::log(big_a2_);
            return series(std::exp(log_t), [&](int j) {
                return (p2_ + j) / (j + 1.0) * (diff_ / big_a2_) * (nu0_ + j) / (p_ + j);
            });
        }
        const double z = std::sqrt(big_a2_) * r;
        const double log_k0 = special::log_bessel_k(nu0_, z);
        const double log_t = log_c_ + (1.0 - nu0_) * std::numbers::ln2 + nu0_ * std::log(z) + log_k0 -
                             dd * std::log(2.0 * std::sqrt(std::numbers::pi)) - std::lgamma(p_) -
                             nu0_ * std::log(big_a2_);
        if (diff_ == 0.0 || p2_ == 0.0) return std::exp(log_t);
        double rho = std::exp(special::log_bessel_k(nu0_ + 1.0, z) - log_k0);  // K_{nu+1}/K_nu
        return series(std::exp(log_t), [&](int j) {
            const double ratio = (p2_ + j) / (j + 1.0) * diff_ / (2.0 * (p_ + j) * big_a2_) * z * rho;
            rho = 1.0 / rho + 2.0 * (nu0_ + j + 1.0) / z;
            return ratio;
        });
    }

private:
    void init(double log_c, double a1sq, double p1, double a2sq, double p2) {
        log_c_ = log_c;
        big_a2_ = a1sq;
        diff_ = a1sq - a2sq;
        p2_ = p2;
        p_ = p1 + p2;
        nu0_ = p_ - 0.5 * d_;
        a2_min_ = p2 > 0.0 ? a2sq : a1sq;
        if (!(nu0_ > 0.0)) throw DomainError("star sum: spectrum is not integrable");
    }

    template <class NextRatio>
    double series(double t0, NextRatio&& next_ratio) const {
        if (diff_ == 0.0 || p2_ == 0.0) return t0;
        const double q = diff_ / big_a2_;
        double sum = t0;
        double t = t0;
        for (int j = 0; j < 200000; ++j) {
            const double ratio = next_ratio(j);
            t *= ratio;
            sum += t;
            const double bound = std::max(ratio, q);
            if (j > 2 && ratio < 1.0 && t * bound / (1.0 - bound) <= 1e-17 * sum) return sum;
        }
        throw PrecisionError("star sum: binomial re-expansion did not converge");
    }

    int d_;
    double log_c_ = 0.0, big_a2_ = 0.0, diff_ = 0.0, p_ = 0.0, p2_ = 0.0, nu0_ = 0.0, a2_min_ = 0.0;
};

inline StarSumRoute resolve_route(const FourierProduct& f, StarSumRoute requested) {
    if (requested == StarSumRoute::Auto)
        return f.has_gaussian_factor() ? StarSumRoute::Frequency : StarSumRoute::RealSpace;
    if (requested == StarSumRoute::RealSpace && f.has_gaussian_factor())
        throw DomainError("star sum: the real-space route needs Laplace/Matern factors only");
    return requested;
}

/// Radius beyond which the real-space tail integral of f is below `abs_tol`.
inline double real_space_cutoff(const MaternProductInverse& f, int d, double abs_tol) {
    const double a = f.decay_rate();
    const double area = sphere_area(d);
    double r = 1.0 / a;
    for (int it = 0; it < 2000; ++it) {
        const double v = f(r);
        if (2.0 * area * std::pow(r, d - 1) * v / a <= abs_tol) return r;
        r *= 1.25;
    }
    throw PrecisionError("star sum: real-space cutoff not found");
}

/// Smallest central value over the Brillouin zone of spacing delta (at its corner).
inline double zone_floor(const FourierProduct& f, double delta) {
    return f(std::sqrt(static_cast<double>(f.d)) * std::numbers::pi / delta);
}

/// Visits every lattice vector i in Z^d with |i| delta <= cutoff once per orbit of coordinate
/// sign flips, passing i with nonnegative entries.
template <class Visit>
void for_each_octant_point(int d, double delta, double cutoff, Visit&& visit) {
    const long lim = static_cast<long>(std::floor(cutoff / delta));
    std::vector<long> idx(static_cast<std::size_t>(d), 0);
    const double cut2 = (cutoff / delta) * (cutoff / delta);
    for (;;) {
        double s = 0.0;
        for (long v : idx) s += static_cast<double>(v) * static_cast<double>(v);
        if (s <= cut2) visit(std::span<const long>(idx), std::sqrt(s) * delta);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] > lim) idx[k++] = 0;
        if (k == idx.size()) break;
    }
}

inline ImageSum frequency_route(const FourierProduct& f, std::span<const double> w, double delta,
                                const StarSumConfig& cfg) {
    const int d = f.d;
    const double step = 2.0 * std::numbers::pi / delta;
    double w2 = 0.0;
    for (double v : w) w2 += v * v;
    ImageSum out;
    out.central = f(std::sqrt(w2));
    CompensatedSum images;
    std::vector<int> n(static_cast<std::size_t>(d));
    for (int s = 1; s <= cfg.max_truncation; ++s) {
        // shell: max_i |n_i| == s
        CompensatedSum shell;
        std::fill(n.begin(), n.end(), -s);
        for (;;) {
            int linf = 0;
            for (int v : n) linf = std::max(linf, std::abs(v));
            if (linf == s) {
                double r2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double t = w[static_cast<std::size_t>(i)] + step * n[static_cast<std::size_t>(i)];
                    r2 += t * t;
                }
                shell.add(f(std::sqrt(r2)));
            }
            int k = 0;
            while (k < d && ++n[static_cast<std::size_t>(k)] > s) n[static_cast<std::size_t>(k++)] = -s;
            if (k == d) break;
        }
        images.add(shell.value());
        if (s >= cfg.truncation && shell.value() <= cfg.rel_tol * images.value()) {
            out.images = images.value();
            return out;
        }
    }
    throw PrecisionError("star sum: relative tolerance not reached at N_max = " + std::to_string(cfg.max_truncation));
}

inline ImageSum real_space_route(const FourierProduct& f, std::span<const double> w, double delta,
                                 const StarSumConfig& cfg) {
    const int d = f.d;
    const MaternProductInverse inv(f);
    double w2 = 0.0;
    for (double v : w) w2 += v * v;
    const double central = f(std::sqrt(w2));
    const double cutoff = real_space_cutoff(inv, d, 1e-3 * cfg.rel_tol * zone_floor(f, delta));
    CompensatedSum acc;
    for_each_octant_point(d, delta, cutoff, [&](std::span<const long> i, double r) {
        // sum over sign flips of cos(w.x) = prod over nonzero coordinates of 2 cos(w_k x_k)
        double c = 1.0;
        for (int k = 0; k < d; ++k)
            if (i[static_cast<std::size_t>(k)] != 0)
                c *= 2.0 * std::cos(w[static_cast<std::size_t>(k)] * delta * static_cast<double>(i[static_cast<std::size_t>(k)]));
        acc.add(inv(r) * c);
    });
    const double total = std::pow(delta, d) * acc.value();
    return {central, std::max(0.0, total - central)};
}

}  // namespace detail

/// F*(w) for a single frequency w in the Brillouin zone [-pi/delta, pi/delta]^d.
inline ImageSum star_sum(const FourierProduct& f, std::span<const double> w, double delta,
                         const StarSumConfig& cfg = {}) {
    if (static_cast<int>(w.size()) != f.d) throw SizeError("star_sum: frequency has wrong dimension");
    if (!(delta > 0.0)) throw DomainError("star_sum: delta must be positive");
    if (cfg.truncation < 1 || cfg.max_truncation < cfg.truncation || !(cfg.rel_tol > 0.0))
        throw DomainError("star_sum: invalid configuration");
    const double edge = std::numbers::pi / delta * (1.0 + 1e-12);
    for (double v : w)
        if (!(std::abs(v) <= edge)) throw DomainError("star_sum: frequency outside the Brillouin zone");
    if (detail::resolve_route(f, cfg.route) == StarSumRoute::Frequency) return detail::frequency_route(f, w, delta, cfg);
    return detail::real_space_route(f, w, delta, cfg);
}

/// Integer frequency k in {-ceil(m/2)+1 .. floor(m/2)} represented by DFT index j in {0..m-1}.
inline long brillouin_index(std::size_t j, std::size_t m) {
    return j <= m / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(m);
}

/// w = (2 pi / L) k for the frequency stored at row-major DFT position `flat`.
inline std::vector<double> brillouin_frequency(std::size_t flat, std::size_t m, int d, double L) {
    std::vector<double> w(static_cast<std::size_t>(d));
    for (int k = d - 1; k >= 0; --k) {
        w[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi / L * static_cast<double>(brillouin_index(flat % m, m));
        flat /= m;
    }
    return w;
}

/// F* at all m^d lattice frequencies of the box [0, L)^d with spacing delta = L / m, stored in
/// row-major DFT order (see brillouin_frequency). The real-space route folds f onto the m^d
/// residues of the lattice and applies one DFT.
inline std::vector<ImageSum> brillouin_star_sums(const FourierProduct& f, double L, std::size_t m,
                                                 const StarSumConfig& cfg = {}) {
    if (!(L > 0.0)) throw DomainError("brillouin_star_sums: L must be positive");
    if (m < 1) throw SizeError("brillouin_star_sums: m must be >= 1");
    const int d = f.d;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= m;
    const double delta = L / static_cast<double>(m);
    std::vector<ImageSum> out(total);

    if (detail::resolve_route(f, cfg.route) == StarSumRoute::Frequency) {
        for (std::size_t i = 0; i < total; ++i) {
            const auto w = brillouin_frequency(i, m, d, L);
            out[i] = detail::frequency_route(f, w, delta, cfg);
        }
        return out;
    }

    const detail::MaternProductInverse inv(f);
    const double cutoff = detail::real_space_cutoff(inv, d, 1e-3 * cfg.rel_tol * detail::zone_floor(f, delta));
    std::vector<CompensatedSum> fold(total);
    std::vector<long> signs(static_cast<std::size_t>(d));
    const long mm = static_cast<long>(m);
    detail::for_each_octant_point(d, delta, cutoff, [&](std::span<const long> i, double r) {
        const double v = inv(r);
        // distribute to every distinct sign pattern
        const unsigned patterns = 1u << d;
        for (unsigned p = 0; p < patterns; ++p) {
            bool duplicate = false;
            std::size_t flat = 0;
            for (int k = 0; k < d; ++k) {
                const bool neg = (p >> k) & 1u;
                if (neg && i[static_cast<std::size_t>(k)] == 0) {
                    duplicate = true;
                    break;
                }
                long c = neg ? -i[static_cast<std::size_t>(k)] : i[static_cast<std::size_t>(k)];
                c %= mm;
                if (c < 0) c += mm;
                flat = flat * m + static_cast<std::size_t>(c);
            }
            if (!duplicate) fold[flat].add(v);
        }
    });
    std::vector<std::complex<double>> buf(total);
    for (std::size_t i = 0; i < total; ++i) buf[i] = fold[i].value();
    dft_inplace(buf, static_cast<int>(m), d, -1);
    const double scale = std::pow(delta, d);
    for (std::size_t i = 0; i < total; ++i) {
        const auto w = brillouin_frequency(i, m, d, L);
        double w2 = 0.0;
        for (double v : w) w2 += v * v;
        const double central = f(std::sqrt(w2));
        out[i] = {central, std::max(0.0, scale * buf[i].real() - central)};
    }
    return out;
}

}  // namespace kcurves
