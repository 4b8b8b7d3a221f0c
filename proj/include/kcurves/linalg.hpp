#pragma once

#include <Eigen/Dense>
#include <string>

#include "kcurves/errors.hpp"

namespace kcurves {

struct JitteredCholesky {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;  // diagonal shift that was actually needed, on top of any ridge
};

/// Cholesky factorization of (K + ridge I), retried with an added diagonal jitter when the
/// matrix is numerically singular: 0, then 1e-12 * trace/n, growing x10 per retry, at most 3 retries.
inline JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& k, double ridge = 0.0) {
    if (k.rows() != k.cols()) throw SizeError("cholesky: matrix is not square");
    if (ridge < 0.0) throw DomainError("cholesky: ridge must be nonnegative");
    const Eigen::Index n = k.rows();
    JitteredCholesky out;
    if (n == 0) return out;
    const double base = 1e-12 * k.trace() / static_cast<double>(n);
    double jitter = 0.0;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        Eigen::MatrixXd shifted = k;
        shifted.diagonal().array() += ridge + jitter;
        out.llt.compute(shifted);
        if (out.llt.info() == Eigen::Success) {
            out.jitter = jitter;
            return out;
        }
        jitter = attempt == 0 ? base : jitter * 10.0;
    }
    throw NumericalError("cholesky failed after jitter escalation up to " + std::to_string(jitter / 10.0),
                         jitter / 10.0);
}

}  // namespace kcurves
