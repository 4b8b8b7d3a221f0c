#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/fitting.hpp"
#include "kcurves/learning_curve.hpp"
#include "kcurves/parallel.hpp"
#include "kcurves/point_cloud.hpp"
#include "kcurves/random.hpp"

namespace kcurves {

/// n points uniform on the unit sphere S^d, embedded in R^{d+1}: i.i.d. standard Gaussian
/// vectors normalized to unit length. d = 1 is the circle in the plane.
inline PointCloud sample_hypersphere(std::size_t n, int d, std::uint64_t seed) {
    if (n < 1) throw SizeError("sample_hypersphere: n must be >= 1");
    if (d < 1) throw DomainError("sample_hypersphere: d must be >= 1");
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal;
    Coords c(static_cast<Eigen::Index>(n), d + 1);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (Eigen::Index j = 0; j < c.cols(); ++j) {
                c(i, j) = normal(rng);
                norm2 += c(i, j) * c(i, j);
            }
        } while (norm2 == 0.0);
        c.row(i) /= std::sqrt(norm2);
    }
    return {std::move(c), Provenance::HypersphereUniform, d, 0.0};
}

/// All m^d grid points L * i / m, i in {0..m-1}^d, in row-major order of i (last axis fastest).
inline PointCloud lattice_points(double L, std::size_t m, int d, std::size_t max_points = std::size_t{1} << 26) {
    if (!(L > 0.0)) throw DomainError("lattice_points: L must be positive");
    if (m < 1) throw SizeError("lattice_points: m must be >= 1");
    if (d < 1) throw DomainError("lattice_points: d must be >= 1");
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) {
        if (n > max_points / m) throw SizeError("lattice_points: m^d exceeds the point budget");
        n *= m;
    }
    Coords c(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rest = i;
        for (int k = d - 1; k >= 0; --k) {
            c(static_cast<Eigen::Index>(i), k) = L * static_cast<double>(rest % m) / static_cast<double>(m);
            rest /= m;
        }
    }
    return {std::move(c), Provenance::Lattice, d, L};
}

struct Metric {
    enum class Kind { Euclidean, PeriodicTorus };
    Kind kind = Kind::Euclidean;
    double period = 0.0;

    static Metric euclidean() { return {}; }
    static Metric periodic(double L) {
        if (!(L > 0.0)) throw DomainError("periodic metric: L must be positive");
        return {Kind::PeriodicTorus, L};
    }

    [[nodiscard]] double squared(std::span<const double> a, std::span<const double> b) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double t = a[i] - b[i];
            if (kind == Kind::PeriodicTorus) {
                t = std::abs(t);
                t = std::fmod(t, period);
                t = std::min(t, period - t);
            }
            s += t * t;
        }
        return s;
    }
};

enum class NnMethod { Auto, BruteForce, KdTree };

namespace detail {

/// Static kd-tree over the rows of a point cloud, exact nearest-other-point queries.
class KdTree {
public:
    explicit KdTree(const PointCloud& pts) : pts_(pts), idx_(pts.size()) {
        std::iota(idx_.begin(), idx_.end(), std::size_t{0});
        nodes_.reserve(2 * pts.size() / kLeaf + 2);
        build(0, idx_.size());
    }

    /// Squared distance from point i to its nearest other point.
    [[nodiscard]] double nearest_other(std::size_t i) const {
        double best = std::numeric_limits<double>::infinity();
        search(0, i, pts_.row(i), best);
        return best;
    }

private:
    static constexpr std::size_t kLeaf = 12;

    struct Node {
        std::size_t begin, end;
        int axis = -1;  // -1 for leaves
        double split = 0.0;
        std::size_t left = 0, right = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end) {
        const std::size_t id = nodes_.size();
        nodes_.push_back({begin, end});
        if (end - begin <= kLeaf) return id;
        const int dim = pts_.dim();
        int axis = 0;
        double widest = -1.0;
        for (int k = 0; k < dim; ++k) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t t = begin; t < end; ++t) {
                const double v = pts_.coords(static_cast<Eigen::Index>(idx_[t]), k);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > widest) {
                widest = hi - lo;
                axis = k;
            }
        }
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(idx_.begin() + static_cast<std::ptrdiff_t>(begin), idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                         idx_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                             return pts_.coords(static_cast<Eigen::Index>(a), axis) <
                                    pts_.coords(static_cast<Eigen::Index>(b), axis);
                         });
        const double split = pts_.coords(static_cast<Eigen::Index>(idx_[mid]), axis);
        const std::size_t l = build(begin, mid);
        const std::size_t r = build(mid, end);
        nodes_[id].axis = axis;
        nodes_[id].split = split;
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    void search(std::size_t node, std::size_t self, std::span<const double> q, double& best) const {
        const Node& nd = nodes_[node];
        if (nd.axis < 0) {
            for (std::size_t t = nd.begin; t < nd.end; ++t) {
                const std::size_t j = idx_[t];
                if (j == self) continue;
                const auto p = pts_.row(j);
                double s = 0.0;
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const double diff = q[k] - p[k];
                    s += diff * diff;
                }
                best = std::min(best, s);
            }
            return;
        }
        const double delta = q[static_cast<std::size_t>(nd.axis)] - nd.split;
        const std::size_t near = delta < 0.0 ? nd.left : nd.right;
        const std::size_t far = delta < 0.0 ? nd.right : nd.left;
        search(near, self, q, best);
        if (delta * delta <= best) search(far, self, q, best);
    }

    const PointCloud& pts_;
    std::vector<std::size_t> idx_;
    std::vector<Node> nodes_;
};

}  // namespace detail

/// Distance from every point to its nearest other point.
/// The O(n^2) scan is the reference; the kd-tree path (Euclidean only) computes the same
/// sums in the same order and therefore returns identical values.
inline std::vector<double> nn_distances(const PointCloud& points, Metric metric = Metric::euclidean(),
                                        NnMethod method = NnMethod::Auto) {
    const std::size_t n = points.size();
    if (n < 2) throw SizeError("nn_distances: need at least two points");
    if (method == NnMethod::Auto)
        method = (metric.kind == Metric::Kind::Euclidean && n > 512) ? NnMethod::KdTree : NnMethod::BruteForce;
    if (method == NnMethod::KdTree && metric.kind != Metric::Kind::Euclidean)
        throw DomainError("nn_distances: kd-tree path supports the Euclidean metric only");

    std::vector<double> out(n);
    if (method == NnMethod::KdTree) {
        const detail::KdTree tree(points);
        parallel_for(0, n, [&](std::size_t i) { out[i] = std::sqrt(tree.nearest_other(i)); });
        return out;
    }
    parallel_for(0, n, [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        const auto xi = points.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            best = std::min(best, metric.squared(xi, points.row(j)));
        }
        out[i] = std::sqrt(best);
    });
    return out;
}

/// k distinct indices drawn uniformly from {0..n-1} (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw SizeError("sample_without_replacement: k > n");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

/// Mean nearest-neighbour distance of `replicas` uniform subsamples of size k; replica r draws
/// from stream derive_seed(seed, r).
inline std::vector<double> nn_replica_means(const PointCloud& dataset, std::size_t k, std::size_t replicas,
                                            std::uint64_t seed, Metric metric = Metric::euclidean()) {
    if (k < 2) throw SizeError("nn_replica_means: subset size must be >= 2");
    if (k > dataset.size()) throw SizeError("nn_replica_means: subset larger than dataset");
    std::vector<double> out(replicas);
    parallel_for(0, replicas, [&](std::size_t r) {
        Rng rng = make_rng(derive_seed(seed, r));
        const auto idx = sample_without_replacement(dataset.size(), k, rng);
        const auto d = nn_distances(dataset.subset(idx), metric);
        double sum = 0.0;
        for (double v : d) sum += v;
        out[r] = sum / static_cast<double>(d.size());
    });
    return out;
}

struct EffectiveDimension {
    LearningCurve mean_nn_distance;  // <delta_min> against subset size
    ExponentFit fit;                 // log <delta_min> against log n

    [[nodiscard]] double d_eff() const { return -1.0 / fit.exponent; }
};

struct EffectiveDimensionOptions {
    std::size_t replicas = 10;
    std::optional<FitWindow> window;  // default: top decade of subset sizes
    Metric metric = Metric::euclidean();
};

/// Nearest-neighbour scaling  <delta_min>(n) ~ n^{-1/d_eff}  over uniform subsamples
/// (without replacement) of `dataset`. Replica r of size index s draws from stream
/// derive_seed(derive_seed(seed, s), r), so the result does not depend on scheduling.
inline EffectiveDimension effective_dimension(const PointCloud& dataset, std::span<const std::size_t> subset_sizes,
                                              std::uint64_t seed, const EffectiveDimensionOptions& opt = {}) {
    if (subset_sizes.size() < 3) throw FitError("effective_dimension: need at least three subset sizes");
    for (std::size_t i = 0; i < subset_sizes.size(); ++i) {
        if (subset_sizes[i] < 2) throw SizeError("effective_dimension: subset sizes must be >= 2");
        if (subset_sizes[i] > dataset.size()) throw SizeError("effective_dimension: subset larger than dataset");
        if (i > 0 && subset_sizes[i] <= subset_sizes[i - 1])
            throw DomainError("effective_dimension: subset sizes must be increasing");
    }
    if (opt.replicas < 1) throw DomainError("effective_dimension: replicas must be >= 1");

    std::vector<double> cell_mean(subset_sizes.size() * opt.replicas);
    parallel_for(0, subset_sizes.size(), [&](std::size_t s) {
        const auto v = nn_replica_means(dataset, subset_sizes[s], opt.replicas, derive_seed(seed, s), opt.metric);
        std::copy(v.begin(), v.end(), cell_mean.begin() + static_cast<std::ptrdiff_t>(s * opt.replicas));
    });

    EffectiveDimension out;
    for (std::size_t s = 0; s < subset_sizes.size(); ++s) {
        const std::span<const double> vals(cell_mean.data() + s * opt.replicas, opt.replicas);
        out.mean_nn_distance.points.push_back(summarize(static_cast<double>(subset_sizes[s]), vals));
    }
    const auto xs = out.mean_nn_distance.ns();
    const auto ys = out.mean_nn_distance.means();
    out.fit = fit_power_law(xs, ys, opt.window.value_or(FitWindow::last_decade(xs)));
    return out;
}

}  // namespace kcurves
