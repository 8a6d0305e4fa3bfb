#include "clsiv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace clsiv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

LeastSquares::LeastSquares(const Matrix& a) : qr_(a) {
    if (a.rows() < a.cols()) {
        throw validation_error("LeastSquares: matrix has fewer rows (" +
                               std::to_string(a.rows()) + ") than columns (" +
                               std::to_string(a.cols()) + ")");
    }
    const double tol = static_cast<double>(std::max(a.rows(), a.cols())) * kEps;
    qr_.setThreshold(tol);
    rank_ = qr_.rank();

    const Index m = std::min(a.rows(), a.cols());
    const auto r_diag = qr_.matrixR().diagonal().head(m).cwiseAbs();
    const double r_max = m > 0 ? r_diag(0) : 0.0;
    const double r_min = rank_ > 0 ? r_diag(rank_ - 1) : 0.0;
    condition_ = (r_min > 0.0) ? r_max / r_min : std::numeric_limits<double>::infinity();
}

void LeastSquares::require_full_rank(const char* op) const {
    if (!full_rank()) {
        throw singular_error(std::string(op) + ": rank-deficient matrix, estimated rank " +
                                 std::to_string(rank_) + " < " + std::to_string(cols()) +
                                 " (condition estimate " + std::to_string(condition_) + ")",
                             rank_, cols(), condition_);
    }
}

Matrix LeastSquares::solve(const Matrix& b) const {
    require_full_rank("solve_normal");
    return qr_.solve(b);
}

Matrix LeastSquares::gram_inverse() const {
    require_full_rank("gram_inverse");
    const Index m = cols();
    const Matrix r = qr_.matrixR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
    const Matrix r_inv =
        r.triangularView<Eigen::Upper>().solve(Matrix::Identity(m, m));
    Matrix inv = r_inv * r_inv.transpose();
    inv = qr_.colsPermutation() * inv * qr_.colsPermutation().transpose();
    return (inv + inv.transpose()) / 2.0;  // exact symmetry for downstream PSD checks
}

Matrix solve_normal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw validation_error("solve_normal: row mismatch between A (" +
                               std::to_string(a.rows()) + ") and B (" +
                               std::to_string(b.rows()) + ")");
    }
    return LeastSquares(a).solve(b);
}

ProjectionCache::ProjectionCache(const Matrix& z) {
    const Index n = z.rows();
    const Index l = z.cols();
    LeastSquares ls(z);
    if (!ls.full_rank()) {
        throw singular_error("project_onto: instrument matrix is rank deficient, estimated rank " +
                                 std::to_string(ls.rank()) + " < " + std::to_string(l),
                             ls.rank(), l, ls.condition_estimate());
    }
    // Thin orthonormal basis from an unpivoted QR; with full column rank the
    // first l columns of Q span col(Z).
    Eigen::HouseholderQR<Matrix> qr(z);
    basis_ = qr.householderQ() * Matrix::Identity(n, l);
    leverages_ = basis_.rowwise().squaredNorm();
}

}  // namespace clsiv
