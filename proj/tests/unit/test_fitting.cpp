#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "kcurves/fitting.hpp"
#include "kcurves/learning_curve.hpp"
#include "kcurves/summation.hpp"

using namespace kcurves;

TEST(FitPowerLaw, ExactData) {
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(std::pow(10.0, 0.1 * i));
        y.push_back(4.0 * std::pow(x.back(), -0.5));
    }
    const auto f = fit_power_law(x, y, {1.0, 1e3});
    EXPECT_NEAR(f.exponent, -0.5, 1e-12);
    EXPECT_NEAR(std::exp(f.log_prefactor), 4.0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_EQ(f.points, 20u);
}

TEST(FitPowerLaw, ConstantHasZeroExponent) {
    const std::vector<double> x{1, 2, 3, 4}, y{5, 5, 5, 5};
    EXPECT_NEAR(fit_power_law(x, y, {1, 4}).exponent, 0.0, 1e-15);
}

TEST(FitPowerLaw, MatchesNormalEquations) {
    std::vector<double> x, y;
    for (int i = 1; i <= 30; ++i) {
        x.push_back(1.3 * i);
        y.push_back(std::pow(x.back(), -1.0) * (1.0 + 0.3 * std::sin(std::log(x.back()))));
    }
    // normal equations [n sx; sx sxx] [b; a] = [sy; sxy]
    double n = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        n += 1;
        sx += lx;
        sxx += lx * lx;
        sy += ly;
        sxy += lx * ly;
    }
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double icpt = (sxx * sy - sx * sxy) / det;
    const auto f = fit_power_law(x, y, {0.0, 1e9});
    EXPECT_NEAR(f.exponent, slope, 1e-12);
    EXPECT_NEAR(f.log_prefactor, icpt, 1e-12);
}

TEST(FitPowerLaw, Errors) {
    const std::vector<double> x{1, 2, 3}, y{1, -1, 2};
    EXPECT_THROW(fit_power_law(x, y, {0, 10}), DomainError);
    const std::vector<double> y2{1, 2, 3};
    EXPECT_THROW(fit_power_law(x, y2, {1.5, 10}), FitError);
}

TEST(FitPowerLaw, DefaultWindowIsLastDecade) {
    std::vector<double> x, y;
    for (int i = 1; i <= 1000; i *= 2) {
        x.push_back(i);
        y.push_back(i < 50 ? 1.0 : std::pow(i, -2.0));
    }
    const auto f = fit_power_law(x, y);
    EXPECT_DOUBLE_EQ(f.window.lo, 51.2);
    EXPECT_NEAR(f.exponent, -2.0, 1e-12);
}

TEST(FitPowerLaw, AffineInvarianceInLogSpace) {
    std::vector<double> x, y, xs;
    for (int i = 1; i <= 12; ++i) {
        x.push_back(i);
        y.push_back(std::pow(i, -0.7) * (1 + 0.1 * std::cos(i)));
        xs.push_back(5.0 * i);
    }
    const auto a = fit_power_law(x, y, {0, 100}), b = fit_power_law(xs, y, {0, 1000});
    EXPECT_NEAR(a.exponent, b.exponent, 1e-12);
    EXPECT_NEAR(b.log_prefactor - a.log_prefactor, -a.exponent * std::log(5.0), 1e-12);
}

TEST(FitPowerLaw, SubWindowOfExactPowerLaw) {
    std::vector<double> x, y;
    for (int i = 1; i <= 100; ++i) {
        x.push_back(i);
        y.push_back(3.0 * std::pow(i, -1.25));
    }
    for (auto w : {FitWindow{1, 100}, FitWindow{5, 20}, FitWindow{50, 100}})
        EXPECT_NEAR(fit_power_law(x, y, w).exponent, -1.25, 1e-12);
}

TEST(LocalSlopes, Examples) {
    const std::vector<double> x{1, 10}, y{1, 0.1};
    const auto s = local_slopes(x, y);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_NEAR(s[0].slope, -1.0, 1e-15);
    std::vector<double> xp, yp;
    for (int i = 1; i < 10; ++i) {
        xp.push_back(i);
        yp.push_back(std::pow(i, 0.4));
    }
    for (const auto& v : local_slopes(xp, yp)) EXPECT_NEAR(v.slope, 0.4, 1e-12);
    EXPECT_THROW(local_slopes(std::vector<double>{1}, std::vector<double>{1}), FitError);
}

TEST(Summation, PairwiseAndCompensated) {
    std::vector<double> v;
    for (int i = 0; i < 100000; ++i) v.push_back(1.0 / ((i + 1.0) * (i + 1.0)));
    const double exact = std::numbers::pi * std::numbers::pi / 6.0 - 1.0 / 100000.0;  // tail ~ 1/N
    EXPECT_NEAR(pairwise_sum(v), exact, 1e-9);
    CompensatedSum c;
    c.add(1e16);
    c.add(1.0);
    c.add(-1e16);
    EXPECT_EQ(c.value(), 1.0);
}

TEST(Summarize, MeanAndSem) {
    const std::vector<double> v{1, 2, 3, 4};
    const auto p = summarize(10, v);
    EXPECT_DOUBLE_EQ(p.mean, 2.5);
    EXPECT_NEAR(p.sem, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
    EXPECT_EQ(p.replicas, 4u);
}
