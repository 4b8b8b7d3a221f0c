#include <gtest/gtest.h>

#include <cmath>

#include "kcurves/fitting.hpp"
#include "kcurves/lattice_theory.hpp"
#include "support/oracles.hpp"

using namespace kcurves;

TEST(LatticeMse, MatchesGramOracleOneDimension) {
    const auto k = KernelSpec::laplace(1.0);
    for (std::size_t m : {8, 16, 32, 64}) {
        const double a = exact_lattice_mse(k, k, 1, 1.0, m);
        const double b = oracle::lattice_mse_by_gram(k, k, 1, 1.0, m);
        EXPECT_NEAR(a, b, 1e-6 * b) << m;
    }
}

TEST(LatticeMse, MatchesGramOracleTwoDimensions) {
    const auto k = KernelSpec::laplace(0.25);
    for (std::size_t m : {3, 6}) {
        const double a = exact_lattice_mse(k, k, 2, 1.0, m);
        const double b = oracle::lattice_mse_by_gram(k, k, 2, 1.0, m);
        EXPECT_NEAR(a, b, 1e-6 * b) << m;
    }
}

TEST(LatticeMse, MismatchedPairsMatchOracle) {
    const auto lap = KernelSpec::laplace(0.5);
    const struct {
        KernelSpec t, s;
    } pairs[] = {{lap, KernelSpec::matern(1.5, 0.3)}, {lap, KernelSpec::gaussian(0.08)},
                 {KernelSpec::gaussian(0.2), lap}, {KernelSpec::matern(2.5, 0.3), lap}};
    for (const auto& p : pairs) {
        const double a = exact_lattice_mse(p.t, p.s, 1, 1.0, 16);
        const double b = oracle::lattice_mse_by_gram(p.t, p.s, 1, 1.0, 16);
        EXPECT_NEAR(a, b, 1e-6 * b) << to_string(p.t.family) << "/" << to_string(p.s.family);
    }
}

TEST(LatticeMse, BayesOptimalSummandsNonnegative) {
    for (const auto& k : {KernelSpec::laplace(0.3), KernelSpec::matern(1.5, 0.2), KernelSpec::gaussian(0.1)})
        for (double v : lattice_mse_summands(k, k, 2, 1.0, 8)) EXPECT_GE(v, 0.0);
}

TEST(LatticeMse, BayesOptimalBeatsMismatchedStudents) {
    const auto teacher = KernelSpec::laplace(0.5);
    for (std::size_t m : {8, 16, 32, 64}) {
        const double best = exact_lattice_mse(teacher, teacher, 1, 1.0, m);
        for (const auto& s : {KernelSpec::gaussian(0.05), KernelSpec::matern(1.5, 0.5), KernelSpec::matern(2.5, 0.2),
                              KernelSpec::laplace(0.1)})
            EXPECT_LE(best, exact_lattice_mse(teacher, s, 1, 1.0, m) * (1.0 + 1e-12)) << m;
    }
}

TEST(LatticeMse, LaplaceDoublingRatio) {
    const auto k = KernelSpec::laplace(1.0);
    const double r = exact_lattice_mse(k, k, 1, 1.0, 1024) / exact_lattice_mse(k, k, 1, 1.0, 512);
    EXPECT_NEAR(r, 0.5, 0.025);
}

TEST(LatticeMse, LaplaceSlopeIsMinusOne) {
    const auto k = KernelSpec::laplace(1.0);
    std::vector<double> n, v;
    for (std::size_t m = 16; m <= 1024; m *= 2) {
        n.push_back(static_cast<double>(m));
        v.push_back(exact_lattice_mse(k, k, 1, 1.0, m));
    }
    EXPECT_NEAR(fit_power_law(n, v, {16, 1024}).exponent, -1.0, 0.03);
}

TEST(LatticeMse, GaussianFasterThanAnyPower) {
    const auto k = KernelSpec::gaussian(1.0);
    const double r = exact_lattice_mse(k, k, 1, 16.0, 64) / exact_lattice_mse(k, k, 1, 16.0, 32);
    EXPECT_LT(r, std::pow(2.0, -6));
}

TEST(TheoremBeta, Examples) {
    for (int d = 1; d <= 8; ++d) {
        const auto lap = spectral_exponent(KernelSpec::laplace(1.0), d);
        EXPECT_NEAR(theorem_beta(lap, lap, d), 1.0 / d, 1e-15);
        EXPECT_NEAR(theorem_beta(SpectralTail::infinite(), lap, d), 2.0 * (d + 1.0) / d, 1e-15);
    }
    for (double nu : {0.5, 1.0, 1.5, 2.0, 3.0})
        EXPECT_NEAR(theorem_beta(spectral_exponent(KernelSpec::matern(nu, 1.0), 1), spectral_exponent(KernelSpec::laplace(1.0), 1), 1),
                    std::min(2.0 * nu, 4.0), 1e-15);
    EXPECT_TRUE(std::isinf(theorem_beta(SpectralTail::infinite(), SpectralTail::infinite(), 3)));
    EXPECT_THROW(theorem_beta(SpectralTail::power_law(2.0), SpectralTail::power_law(4.0), 2), DomainError);
}

TEST(SmoothnessIndex, Examples) {
    EXPECT_EQ(smoothness_index(spectral_exponent(KernelSpec::laplace(1.0), 4), 4), 0);
    EXPECT_EQ(smoothness_index(spectral_exponent(KernelSpec::matern(1.5, 1.0), 1), 1), 1);
    EXPECT_EQ(smoothness_index(SpectralTail::power_law(3 + 9.0), 3), 4);
    EXPECT_FALSE(smoothness_index(SpectralTail::infinite(), 2).has_value());
    EXPECT_THROW(smoothness_index(SpectralTail::power_law(1.0), 2), DomainError);
}
