#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "kcurves/errors.hpp"

namespace kcurves {

enum class Provenance { HypersphereUniform, Lattice, External };

using Coords = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n points stored as the rows of `coords`.
struct PointCloud {
    Coords coords;
    Provenance provenance = Provenance::External;
    int intrinsic_dim = 0;  // manifold dimension d (S^d for hypersphere samples, d for lattices)
    double period = 0.0;    // side L of the periodic box for lattices, 0 otherwise

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
    [[nodiscard]] int dim() const { return static_cast<int>(coords.cols()); }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(coords.cols()), static_cast<std::size_t>(coords.cols())};
    }

    /// First k points (nested training sets share their prefix).
    [[nodiscard]] PointCloud head(std::size_t k) const {
        if (k > size()) throw SizeError("PointCloud::head: not enough points");
        PointCloud out{coords.topRows(static_cast<Eigen::Index>(k)), provenance, intrinsic_dim, period};
        return out;
    }

    /// Rows [first, first + k).
    [[nodiscard]] PointCloud slice(std::size_t first, std::size_t k) const {
        if (first + k > size()) throw SizeError("PointCloud::slice: out of range");
        return {coords.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(k)), provenance,
                intrinsic_dim, period};
    }

    [[nodiscard]] PointCloud subset(std::span<const std::size_t> indices) const {
        Coords c(static_cast<Eigen::Index>(indices.size()), coords.cols());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] >= size()) throw SizeError("PointCloud::subset: index out of range");
            c.row(static_cast<Eigen::Index>(i)) = coords.row(static_cast<Eigen::Index>(indices[i]));
        }
        return {std::move(c), provenance, intrinsic_dim, period};
    }
};

/// Stacks two clouds of equal dimension (e.g. training and test points sampled jointly).
inline PointCloud concat(const PointCloud& a, const PointCloud& b) {
    if (a.size() > 0 && b.size() > 0 && a.dim() != b.dim()) throw SizeError("concat: dimension mismatch");
    const Eigen::Index cols = a.size() > 0 ? a.coords.cols() : b.coords.cols();
    Coords c(a.coords.rows() + b.coords.rows(), cols);
    if (a.size() > 0) c.topRows(a.coords.rows()) = a.coords;
    if (b.size() > 0) c.bottomRows(b.coords.rows()) = b.coords;
    return {std::move(c), a.provenance, a.intrinsic_dim, a.period};
}

}  // namespace kcurves
