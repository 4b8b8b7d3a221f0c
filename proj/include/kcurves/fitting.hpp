#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kcurves/errors.hpp"

namespace kcurves {

/// Closed interval of abscissae a fit was restricted to.
struct FitWindow {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }

    /// The last decade [x_max / 10, x_max].
    static FitWindow last_decade(std::span<const double> xs) {
        double hi = 0.0;
        for (double x : xs) hi = std::max(hi, x);
        return {hi / 10.0, hi};
    }
};

/// y ≈ exp(log_prefactor) * x^exponent over `window`.
struct ExponentFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    FitWindow window;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares line y = intercept + slope x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw SizeError("fit_line: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw FitError("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw FitError("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return f;
}

/// Least squares of log y on log x over the points with x inside `window`.
inline ExponentFit fit_power_law(std::span<const double> xs, std::span<const double> ys, FitWindow window) {
    if (xs.size() != ys.size()) throw SizeError("fit_power_law: length mismatch");
    if (!(window.hi >= window.lo)) throw FitError("fit_power_law: empty window");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!window.contains(xs[i])) continue;
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("fit_power_law: values must be positive");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    if (lx.size() < 3) throw FitError("fit_power_law: fewer than 3 points in window");
    const LineFit line = fit_line(lx, ly);
    return {line.slope, line.intercept, window, line.r_squared, lx.size()};
}

inline ExponentFit fit_power_law(std::span<const double> xs, std::span<const double> ys) {
    return fit_power_law(xs, ys, FitWindow::last_decade(xs));
}

struct LocalSlope {
    double x_mid;  // geometric midpoint
    double slope;
};

/// Successive log-log finite differences.
inline std::vector<LocalSlope> local_slopes(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw SizeError("local_slopes: length mismatch");
    if (xs.size() < 2) throw FitError("local_slopes: need at least two points");
    std::vector<LocalSlope> out;
    out.reserve(xs.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("local_slopes: values must be positive");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double dlx = std::log(xs[i]) - std::log(xs[i - 1]);
        if (dlx == 0.0) throw FitError("local_slopes: repeated abscissa");
        out.push_back({std::sqrt(xs[i] * xs[i - 1]), (std::log(ys[i]) - std::log(ys[i - 1])) / dlx});
    }
    return out;
}

}  // namespace kcurves
