#pragma once

#include <Eigen/Dense>

#include "clsiv/errors.hpp"

namespace clsiv {

using Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Rank-revealing least-squares factorization of a tall matrix A (n x m,
/// n >= m). Column-pivoted Householder QR; rank tolerance follows the
/// numerical-rank convention max(n,m) * eps relative to the largest
/// R diagonal. Explicit inverses of A'A are derived from R, never from the
/// normal equations, so the conditioning of A enters only once.
class LeastSquares {
public:
    explicit LeastSquares(const Matrix& a);

    Index rank() const { return rank_; }
    Index cols() const { return qr_.cols(); }
    bool full_rank() const { return rank_ == qr_.cols(); }

    /// Ratio of largest to smallest retained R diagonal; rough condition gauge.
    double condition_estimate() const { return condition_; }

    /// Solution of min_G ||A G - B||_F. Throws singular_error if rank(A) < m.
    Matrix solve(const Matrix& b) const;

    /// (A'A)^{-1}, computed as P R^{-1} R^{-T} P'. Throws singular_error if
    /// rank deficient.
    Matrix gram_inverse() const;

private:
    void require_full_rank(const char* op) const;

    Eigen::ColPivHouseholderQR<Matrix> qr_;
    Index rank_;
    double condition_;
};

/// min_G ||A G - B||_F via orthogonal decomposition. n >= m required;
/// rank(A) < m raises singular_error carrying the estimated rank.
Matrix solve_normal(const Matrix& a, const Matrix& b);

/// Projection onto col(Z), stored factored (thin orthonormal basis), never
/// as a dense n x n hat matrix. Also exposes the leverages h_i, the diagonal
/// of the hat matrix.
class ProjectionCache {
public:
    /// Requires rank(Z) = Z.cols(); otherwise singular_error.
    explicit ProjectionCache(const Matrix& z);

    /// H_z * M.
    Matrix apply(const Matrix& m) const { return basis_ * (basis_.transpose() * m); }

    const Vector& leverages() const { return leverages_; }
    Index rank() const { return basis_.cols(); }

private:
    Matrix basis_;      // n x l, orthonormal columns spanning col(Z)
    Vector leverages_;  // h_i = squared norm of row i of the basis
};

/// Convenience wrapper matching the factory-style contract.
inline ProjectionCache project_onto(const Matrix& z) { return ProjectionCache(z); }

}  // namespace clsiv
