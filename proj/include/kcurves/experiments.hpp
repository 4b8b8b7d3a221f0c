#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kcurves/datasets.hpp"
#include "kcurves/errors.hpp"
#include "kcurves/geometry.hpp"
#include "kcurves/gram.hpp"
#include "kcurves/grf.hpp"
#include "kcurves/kernel.hpp"
#include "kcurves/lattice_theory.hpp"
#include "kcurves/learning_curve.hpp"
#include "kcurves/linalg.hpp"
#include "kcurves/parallel.hpp"
#include "kcurves/random.hpp"
#include "kcurves/regression.hpp"
#include "kcurves/spectral_predict.hpp"
#include "kcurves/svm.hpp"

namespace kcurves {

/// Result of one sweep cell: one value per training size plus the largest jitter used.
struct CellResult {
    std::vector<double> values;
    double jitter = 0.0;
};

/// Mean and standard error over cells, per training size.
inline LearningCurve aggregate(std::span<const std::size_t> n_grid, std::span<const CellResult> cells) {
    LearningCurve curve;
    std::vector<double> column(cells.size());
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
        for (std::size_t r = 0; r < cells.size(); ++r) {
            if (cells[r].values.size() != n_grid.size()) throw SizeError("aggregate: cell has the wrong length");
            column[r] = cells[r].values[k];
        }
        curve.points.push_back(summarize(static_cast<double>(n_grid[k]), column));
    }
    return curve;
}

inline void check_grid(std::span<const std::size_t> n_grid, const char* who) {
    if (n_grid.empty()) throw DomainError(std::string(who) + ": empty n grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw DomainError(std::string(who) + ": training sizes must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw DomainError(std::string(who) + ": n grid must be increasing");
    }
}

/// Teacher-Student regression on the unit sphere S^d: teacher field sampled jointly at
/// n_max + n_test uniform points, nested training prefixes of sizes n_grid, fresh test points.
struct TeacherStudentSpec {
    KernelSpec teacher;
    KernelSpec student;
    int d = 1;
    std::vector<std::size_t> n_grid;
    std::size_t n_test = 1000;
    double ridge = 0.0;
};

inline CellResult teacher_student_replica(const TeacherStudentSpec& spec, std::uint64_t seed) {
    check_grid(spec.n_grid, "teacher-student");
    if (spec.n_test < 1) throw DomainError("teacher-student: n_test must be >= 1");
    const std::size_t n_max = spec.n_grid.back();
    const PointCloud pts = sample_hypersphere(n_max + spec.n_test, spec.d, derive_seed(seed, 0));
    const JitteredCholesky field = jittered_cholesky(gram(spec.teacher, pts));
    Rng rng = make_rng(derive_seed(seed, 1));
    const Eigen::VectorXd z = sample_gaussian(field, rng);

    const PointCloud train = pts.head(n_max);
    const PointCloud test = pts.slice(n_max, spec.n_test);
    const Eigen::VectorXd truth = z.tail(static_cast<Eigen::Index>(spec.n_test));
    const Eigen::MatrixXd ks = gram(spec.student, train);
    const Eigen::MatrixXd kx = cross_gram(spec.student, test, train);

    CellResult out;
    out.jitter = field.jitter;
    for (std::size_t n : spec.n_grid) {
        const auto ni = static_cast<Eigen::Index>(n);
        const Interpolant fit = solve_interpolant(ks.topLeftCorner(ni, ni), z.head(ni), spec.ridge);
        out.jitter = std::max(out.jitter, fit.jitter);
        const Eigen::VectorXd pred = kx.leftCols(ni) * fit.coefficients;
        out.values.push_back(empirical_mse(pred, truth));
    }
    return out;
}

/// Regression (labels +-1, MSE) or soft-margin SVM (error rate) on random subsets of a
/// labeled dataset: nested training prefixes of one random permutation, disjoint test points.
enum class RealDataTask { Regression, Svm };

struct RealDataSpec {
    KernelSpec student;
    std::vector<std::size_t> n_grid;
    std::size_t n_test = 1000;
    RealDataTask task = RealDataTask::Regression;
    SvmOptions svm;
};

inline CellResult realdata_replica(const LabeledDataset& data, const RealDataSpec& spec, std::uint64_t seed) {
    check_grid(spec.n_grid, "realdata");
    const std::size_t n_max = spec.n_grid.back();
    if (n_max + spec.n_test > data.points.size()) throw SizeError("realdata: dataset smaller than n_max + n_test");
    Rng rng = make_rng(seed);
    const auto idx = sample_without_replacement(data.points.size(), n_max + spec.n_test, rng);
    const PointCloud all = data.points.subset(idx);
    Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) y(static_cast<Eigen::Index>(i)) = data.labels(static_cast<Eigen::Index>(idx[i]));

    const PointCloud train = all.head(n_max);
    const PointCloud test = all.slice(n_max, spec.n_test);
    const Eigen::VectorXd truth = y.tail(static_cast<Eigen::Index>(spec.n_test));
    const Eigen::MatrixXd ks = gram(spec.student, train);
    const Eigen::MatrixXd kx = cross_gram(spec.student, test, train);
    CellResult out;
    for (std::size_t n : spec.n_grid) {
        const auto ni = static_cast<Eigen::Index>(n);
        const Eigen::VectorXd yn = y.head(ni);
        if (spec.task == RealDataTask::Regression) {
            const Interpolant fit = solve_interpolant(ks.topLeftCorner(ni, ni), yn);
            out.jitter = std::max(out.jitter, fit.jitter);
            out.values.push_back(empirical_mse(kx.leftCols(ni) * fit.coefficients, truth));
        } else {
            if (yn.maxCoeff() == yn.minCoeff()) {
                // one class only: the constant classifier
                out.values.push_back(error_rate(Eigen::VectorXd::Constant(truth.size(), yn(0)), truth));
                continue;
            }
            const SvmModel model = train_soft_margin(ks.topLeftCorner(ni, ni), yn, spec.svm);
            Eigen::VectorXd f = kx.leftCols(ni) * model.alphas.cwiseProduct(yn);
            for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = f(i) + model.bias >= 0.0 ? 1.0 : -1.0;
            out.values.push_back(error_rate(f, truth));
        }
    }
    return out;
}

/// Exact lattice MSE for each m of `m_grid`; the curve abscissa is n = m^d.
inline LearningCurve lattice_curve(const KernelSpec& teacher, const KernelSpec& student, int d, double L,
                                   std::span<const std::size_t> m_grid, const StarSumConfig& cfg = {}) {
    LearningCurve curve;
    for (std::size_t m : m_grid) {
        const double n = std::pow(static_cast<double>(m), d);
        curve.points.push_back({n, exact_lattice_mse(teacher, student, d, L, m, cfg), 0.0, 1});
    }
    return curve;
}

struct KpcaResult {
    SpectralDecomposition decomposition;
    LearningCurve tail;
    BetaEstimate beta;
};

/// Every rank 1..n_tilde.
inline std::vector<std::size_t> rank_grid(std::size_t n_tilde) {
    std::vector<std::size_t> g(n_tilde);
    for (std::size_t r = 0; r < n_tilde; ++r) g[r] = r + 1;
    return g;
}

inline KpcaResult kpca_from_labels(const KernelSpec& student, const PointCloud& points, const Eigen::VectorXd& labels,
                                   std::optional<FitWindow> window = std::nullopt) {
    KpcaResult out;
    out.decomposition = kernel_pca(gram(student, points), labels);
    const auto grid = rank_grid(points.size());
    out.tail = tail_power_curve(out.decomposition, grid);
    out.beta = beta_from_tail(out.tail, window);
    return out;
}

/// Kernel PCA predictor for a synthetic teacher field on S^d sampled at n_tilde points.
/// With draws > 1 the tail curve is the average over independent teacher fields on the same
/// points, an estimate of the expected tail power; `decomposition` holds the first draw.
inline KpcaResult kpca_synthetic(const KernelSpec& teacher, const KernelSpec& student, int d, std::size_t n_tilde,
                                 std::uint64_t seed, std::optional<FitWindow> window = std::nullopt,
                                 std::size_t draws = 1) {
    if (draws < 1) throw DomainError("kpca: draws must be >= 1");
    const PointCloud pts = sample_hypersphere(n_tilde, d, derive_seed(seed, 0));
    const JitteredCholesky field = jittered_cholesky(gram(teacher, pts));
    KpcaResult out;
    out.decomposition = kernel_pca(gram(student, pts), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_tilde)));
    const auto grid = rank_grid(n_tilde);
    std::vector<CurvePoint> acc;
    for (std::size_t k = 0; k < draws; ++k) {
        Rng rng = make_rng(derive_seed(derive_seed(seed, 1), k));
        const Eigen::VectorXd z = sample_gaussian(field, rng);
        SpectralDecomposition dec{out.decomposition.eigenvalues, Eigen::MatrixXd(), out.decomposition.eigenvectors.transpose() * z};
        const LearningCurve tail = tail_power_curve(dec, grid);
        if (k == 0) {
            out.decomposition.projections = dec.projections;
            acc = tail.points;
        } else {
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i].mean += tail.points[i].mean;
        }
    }
    for (auto& p : acc) {
        p.mean /= static_cast<double>(draws);
        p.replicas = draws;
    }
    out.tail.points = std::move(acc);
    out.beta = beta_from_tail(out.tail, window);
    return out;
}

/// Self-consistent curve on a synthetic power-law spectrum: lambda_rho = rho^{-alpha_S/d} for
/// rho = 1..modes and teacher-matched weights w^2 = lambda^q, q = (theta - theta_T)/(theta_T - 1).
inline SpectralWeights power_law_weights(double alpha_t, double alpha_s, int d, std::size_t modes) {
    if (!(alpha_s > d) || !(alpha_t > d) || std::isinf(alpha_s))
        throw DomainError("power_law_weights: need finite alpha_S > d and alpha_T > d");
    if (std::isinf(alpha_t)) throw DomainError("power_law_weights: infinite alpha_T has no power-law weights");
    const double theta = density_exponent(alpha_s, d);
    const double q = weight_exponent(theta, density_exponent(alpha_t, d));
    SpectralWeights w;
    for (std::size_t r = 1; r <= modes; ++r) {
        const double l = std::pow(static_cast<double>(r), -1.0 / (theta - 1.0));
        w.lambda.push_back(l);
        w.w2.push_back(std::pow(l, q));
    }
    return w;
}

}  // namespace kcurves
