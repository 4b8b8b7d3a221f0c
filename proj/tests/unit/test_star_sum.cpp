#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kcurves/star_sum.hpp"
#include "support/oracles.hpp"

using namespace kcurves;

TEST(StarSum, GaussianImagesNegligible) {
    const double delta = 0.2;  // sigma * 2 pi / delta = 31.4
    const auto f = FourierProduct::single(KernelSpec::gaussian(1.0), 1);
    const std::vector<double> w{0.0};
    const auto s = star_sum(f, w, delta);
    EXPECT_NEAR(s.total(), fourier_radial(KernelSpec::gaussian(1.0), 0.0, 1), 1e-12 * s.total());
    EXPECT_LT(s.images, 1e-12 * s.central);
}

TEST(StarSum, PeriodicAcrossTheZoneBoundary) {
    const double delta = 0.25;
    const auto lap = KernelSpec::laplace(0.3);
    const std::vector<double> lo{-std::numbers::pi / delta}, hi{std::numbers::pi / delta};
    for (auto route : {StarSumRoute::Frequency, StarSumRoute::RealSpace}) {
        // a single Laplace spectrum converges too slowly for the frequency route
        const auto f = route == StarSumRoute::Frequency ? FourierProduct::product(lap, lap, 1) : FourierProduct::single(lap, 1);
        StarSumConfig cfg;
        cfg.route = route;
        cfg.max_truncation = 4000;
        EXPECT_NEAR(star_sum(f, lo, delta, cfg).total(), star_sum(f, hi, delta, cfg).total(),
                    1e-12 * star_sum(f, hi, delta, cfg).total());
    }
}

TEST(StarSum, LaplaceMatchesMillionImageOracle) {
    const double delta = 0.25, sigma = 1.0;
    const double w0 = std::numbers::pi / delta;
    const auto f = FourierProduct::single(KernelSpec::laplace(sigma), 1);
    const std::vector<double> w{w0};
    const double want = oracle::laplace_star_sum_1d(sigma, 1.0, w0, delta, 1000000);
    EXPECT_NEAR(star_sum(f, w, delta).total(), want, 1e-8 * want);
    for (double frac : {0.0, 0.3, 0.77}) {
        const std::vector<double> v{frac * w0};
        const double o = oracle::laplace_star_sum_1d(sigma, 1.0, frac * w0, delta, 1000000);
        EXPECT_NEAR(star_sum(f, v, delta).total(), o, 1e-8 * o) << frac;
    }
}

TEST(StarSum, RoutesAgreeOnProducts) {
    const double delta = 0.1;
    const auto lap = KernelSpec::laplace(0.2), mat = KernelSpec::matern(1.5, 0.15);
    for (int d : {1, 2, 3}) {
        for (const auto& f : {FourierProduct::product(lap, lap, d), FourierProduct::product(lap, mat, d),
                              FourierProduct::product(mat, mat, d)}) {
            std::vector<double> w(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k) w[static_cast<std::size_t>(k)] = (0.9 - 0.4 * k) * std::numbers::pi / delta;
            StarSumConfig fr, rs;
            fr.route = StarSumRoute::Frequency;
            fr.max_truncation = 4000;
            fr.rel_tol = 1e-10;
            rs.route = StarSumRoute::RealSpace;
            const double a = star_sum(f, w, delta, fr).total();
            const double b = star_sum(f, w, delta, rs).total();
            // the frequency route stops at rel_tol 1e-10 of its own partial sums; its remainder is of that order
            EXPECT_NEAR(a, b, 5e-6 * b) << "d=" << d;
        }
    }
}

TEST(StarSum, PrecisionErrorWhenTruncationTooSmall) {
    StarSumConfig cfg;
    cfg.route = StarSumRoute::Frequency;
    cfg.max_truncation = 4;
    const std::vector<double> w{0.0};
    EXPECT_THROW(star_sum(FourierProduct::single(KernelSpec::laplace(1.0), 1), w, 0.1, cfg), PrecisionError);
}

TEST(StarSum, RejectsFrequencyOutsideZone) {
    const std::vector<double> w{4.0};
    EXPECT_THROW(star_sum(FourierProduct::single(KernelSpec::laplace(1.0), 1), w, 1.0), DomainError);
    const std::vector<double> w2{0.0, 0.0};
    EXPECT_THROW(star_sum(FourierProduct::single(KernelSpec::laplace(1.0), 1), w2, 1.0), SizeError);
}

TEST(Brillouin, Enumeration) {
    std::vector<long> k4, k5;
    for (std::size_t j = 0; j < 4; ++j) k4.push_back(brillouin_index(j, 4));
    for (std::size_t j = 0; j < 5; ++j) k5.push_back(brillouin_index(j, 5));
    EXPECT_EQ(k4, (std::vector<long>{0, 1, 2, -1}));
    EXPECT_EQ(k5, (std::vector<long>{0, 1, 2, -2, -1}));
    const auto w = brillouin_frequency(1 * 4 + 3, 4, 2, 2.0);
    EXPECT_NEAR(w[0], std::numbers::pi * 1, 1e-15);
    EXPECT_NEAR(w[1], -std::numbers::pi, 1e-15);
}

TEST(Brillouin, BatchMatchesPointwise) {
    const double L = 1.0;
    const std::size_t m = 6;
    for (int d : {1, 2}) {
        for (const auto& f : {FourierProduct::product(KernelSpec::laplace(0.2), KernelSpec::matern(2.5, 0.1), d),
                              FourierProduct::single(KernelSpec::gaussian(0.3), d)}) {
            const auto batch = brillouin_star_sums(f, L, m);
            std::size_t total = d == 1 ? m : m * m;
            ASSERT_EQ(batch.size(), total);
            for (std::size_t i = 0; i < total; ++i) {
                const auto w = brillouin_frequency(i, m, d, L);
                const double one = star_sum(f, w, L / static_cast<double>(m)).total();
                EXPECT_NEAR(batch[i].total(), one, 1e-10 * one) << d << " " << i;
            }
        }
    }
}
