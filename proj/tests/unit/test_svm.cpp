#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kcurves/geometry.hpp"
#include "kcurves/grf.hpp"
#include "kcurves/svm.hpp"
#include "support/oracles.hpp"

using namespace kcurves;

namespace {

struct Problem {
    PointCloud points;
    Eigen::MatrixXd gram;
    Eigen::VectorXd labels;
};

Problem teacher_sign_problem(std::size_t n, std::uint64_t seed, const KernelSpec& k = KernelSpec::laplace(1.0)) {
    Problem p;
    p.points = sample_hypersphere(n, 2, seed);
    const Eigen::VectorXd z = sample_field(KernelSpec::laplace(1.0), p.points, seed + 1000).values;
    p.labels = z.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    p.gram = gram(k, p.points);
    return p;
}

/// Largest violation of the per-point KKT conditions.
double kkt_violation(const SvmModel& m, const Problem& p) {
    const Eigen::VectorXd f = decision_values(m, p.gram, p.labels);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double yf = p.labels(i) * f(i);
        const double a = m.alphas(i);
        if (a <= 0.0) worst = std::max(worst, 1.0 - yf);
        else if (a >= m.C) worst = std::max(worst, yf - 1.0);
        else worst = std::max(worst, std::abs(yf - 1.0));
    }
    return worst;
}

}  // namespace

TEST(Svm, TwoSeparatedPoints) {
    Coords c(2, 1);
    c << 0.0, 5.0;
    const PointCloud pts{c, Provenance::External, 1, 0.0};
    const auto k = KernelSpec::gaussian(1.0);
    const Eigen::MatrixXd g = gram(k, pts);
    const Eigen::Vector2d y(1.0, -1.0);
    const auto m = train_soft_margin(g, y);
    EXPECT_GT(m.alphas(0), 0.0);
    EXPECT_NEAR(m.alphas(0), m.alphas(1), 1e-12);
    // analytic dual: a = 2 / (K11 + K22 - 2 K12)
    EXPECT_NEAR(m.alphas(0), 2.0 / (2.0 - 2.0 * g(0, 1)), 1e-6);
    EXPECT_EQ(error_rate(classify(m, k, pts, y, pts), y), 0.0);
}

TEST(Svm, EqualityConstraintAndBox) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = teacher_sign_problem(80, seed);
        SvmOptions opt;
        opt.C = 5.0;
        const auto m = train_soft_margin(p.gram, p.labels, opt);
        EXPECT_LT(std::abs(m.alphas.dot(p.labels)), 1e-6 * opt.C * 80);
        EXPECT_GE(m.alphas.minCoeff(), 0.0);
        EXPECT_LE(m.alphas.maxCoeff(), opt.C);
        EXPECT_LE(kkt_violation(m, p), opt.tol + 1e-12) << seed;
    }
}

TEST(Svm, ObjectiveMatchesReferenceQp) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto p = teacher_sign_problem(60, seed, KernelSpec::laplace(0.5));
        SvmOptions opt;
        opt.tol = 1e-6;
        const auto m = train_soft_margin(p.gram, p.labels, opt);
        const double ref = oracle::svm_reference_objective(p.gram, p.labels, opt.C);
        EXPECT_NEAR(m.objective, ref, 1e-3 * std::max(1.0, std::abs(ref))) << seed;
    }
}

TEST(Svm, ObjectiveNeverIncreases) {
    const auto p = teacher_sign_problem(100, 4);
    SvmOptions opt;
    opt.record_objective = true;
    const auto m = train_soft_margin(p.gram, p.labels, opt);
    ASSERT_FALSE(m.objective_trace.empty());
    for (std::size_t i = 1; i < m.objective_trace.size(); ++i)
        EXPECT_LE(m.objective_trace[i], m.objective_trace[i - 1] + 1e-9 * std::abs(m.objective_trace[i - 1]));
}

TEST(Svm, TrainErrorZeroAtLargeC) {
    const auto p = teacher_sign_problem(120, 9);
    const auto k = KernelSpec::laplace(1.0);
    const auto m = train_soft_margin(p.gram, p.labels);
    EXPECT_EQ(error_rate(classify(m, k, p.points, p.labels, p.points), p.labels), 0.0);
}

TEST(Svm, FlippingLabelsFlipsPredictions) {
    const auto p = teacher_sign_problem(70, 2);
    const auto k = KernelSpec::laplace(1.0);
    const auto test = sample_hypersphere(200, 2, 99);
    SvmOptions opt;
    opt.tol = 1e-8;
    const auto a = train_soft_margin(p.gram, p.labels, opt);
    const auto b = train_soft_margin(p.gram, -p.labels, opt);
    const Eigen::VectorXd ca = classify(a, k, p.points, p.labels, test);
    const Eigen::VectorXd cb = classify(b, k, p.points, -p.labels, test);
    // margins far from zero must flip; ties at the boundary are measure zero here
    EXPECT_TRUE((ca.array() == -cb.array()).all());
}

TEST(Svm, DuplicatePointLeavesDecisionUnchanged) {
    const auto p = teacher_sign_problem(50, 6);
    const auto k = KernelSpec::laplace(1.0);
    const auto test = sample_hypersphere(30, 2, 7);
    SvmOptions opt;
    opt.tol = 1e-10;
    const auto m = train_soft_margin(p.gram, p.labels, opt);
    const Eigen::VectorXd f = cross_gram(k, test, p.points) * m.alphas.cwiseProduct(p.labels) + Eigen::VectorXd::Constant(30, m.bias);

    std::vector<std::size_t> idx(50);
    std::iota(idx.begin(), idx.end(), 0);
    idx.push_back(3);
    const PointCloud dup = p.points.subset(idx);
    Eigen::VectorXd y2(51);
    y2.head(50) = p.labels;
    y2(50) = p.labels(3);
    const auto m2 = train_soft_margin(gram(k, dup), y2, opt);
    const Eigen::VectorXd f2 = cross_gram(k, test, dup) * m2.alphas.cwiseProduct(y2) + Eigen::VectorXd::Constant(30, m2.bias);
    EXPECT_LT((f - f2).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Svm, Errors) {
    const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(3, 3);
    EXPECT_THROW(train_soft_margin(g, Eigen::Vector3d(1, 1, 1)), DomainError);
    EXPECT_THROW(train_soft_margin(g, Eigen::Vector3d(1, 0.5, -1)), DomainError);
    SvmOptions opt;
    opt.C = -1;
    EXPECT_THROW(train_soft_margin(g, Eigen::Vector3d(1, -1, 1), opt), DomainError);
    EXPECT_THROW(error_rate(Eigen::VectorXd(0), Eigen::VectorXd(0)), SizeError);
}

TEST(Svm, SignOfZeroIsPositive) {
    SvmModel m;
    m.alphas = Eigen::VectorXd::Zero(2);
    m.bias = 0.0;
    m.C = 1.0;
    const auto pts = sample_hypersphere(2, 1, 1);
    const Eigen::VectorXd c = classify(m, KernelSpec::laplace(1.0), pts, Eigen::Vector2d(1, -1), pts);
    EXPECT_EQ(c(0), 1.0);
    EXPECT_EQ(c(1), 1.0);
}
