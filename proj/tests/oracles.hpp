// Independent reference implementations used as test oracles. Everything here
// goes through explicit loops and dense normal equations on purpose: these
// paths must stay independent of the QR-based library code they check.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "clsiv/data_model.hpp"

namespace oracles {

using clsiv::Index;
using clsiv::Matrix;
using clsiv::Vector;

// Gauss-Jordan inverse with partial pivoting.
inline Matrix invert(Matrix a) {
    const Index n = a.rows();
    Matrix inv = Matrix::Identity(n, n);
    for (Index col = 0; col < n; ++col) {
        Index pivot = col;
        for (Index r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (a(pivot, col) == 0.0) throw std::runtime_error("oracle invert: singular");
        if (pivot != col) {
            a.row(pivot).swap(a.row(col));
            inv.row(pivot).swap(inv.row(col));
        }
        const double d = a(col, col);
        a.row(col) /= d;
        inv.row(col) /= d;
        for (Index r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            a.row(r) -= f * a.row(col);
            inv.row(r) -= f * inv.row(col);
        }
    }
    return inv;
}

// (X'X)^{-1} X'y via explicit loops and Gauss-Jordan.
inline Vector normal_equations_beta(const Matrix& x, const Vector& y) {
    const Index n = x.rows(), k = x.cols();
    Matrix xtx = Matrix::Zero(k, k);
    Vector xty = Vector::Zero(k);
    for (Index i = 0; i < n; ++i) {
        for (Index a = 0; a < k; ++a) {
            xty(a) += x(i, a) * y(i);
            for (Index b = 0; b < k; ++b) xtx(a, b) += x(i, a) * x(i, b);
        }
    }
    return invert(xtx) * xty;
}

// Dense hat matrix Z (Z'Z)^{-1} Z'.
inline Matrix dense_hat(const Matrix& z) { return z * invert(z.transpose() * z) * z.transpose(); }

// TSLS through the dense projection: (X' H X)^{-1} X' H y.
inline Vector tsls_dense(const Matrix& x, const Matrix& z, const Vector& y) {
    const Matrix h = dense_hat(z);
    return invert(x.transpose() * h * x) * (x.transpose() * h * y);
}

// JIVE first-stage rows by literally refitting without each observation.
inline Matrix jive_rows_literal(const Matrix& x, const Matrix& z) {
    const Index n = x.rows(), k = x.cols(), l = z.cols();
    Matrix rows(n, k);
    for (Index drop = 0; drop < n; ++drop) {
        Matrix zi(n - 1, l), xi(n - 1, k);
        Index r = 0;
        for (Index i = 0; i < n; ++i) {
            if (i == drop) continue;
            zi.row(r) = z.row(i);
            xi.row(r) = x.row(i);
            ++r;
        }
        const Matrix gamma_i = invert(zi.transpose() * zi) * (zi.transpose() * xi);
        rows.row(drop) = z.row(drop) * gamma_i;
    }
    return rows;
}

inline Vector jive_beta_literal(const Matrix& x, const Matrix& z, const Vector& y) {
    const Matrix xj = jive_rows_literal(x, z);
    return invert(xj.transpose() * x) * (xj.transpose() * y);
}

struct PairOracle {
    double sigma2_cross;
    Matrix cov_cross;
    Matrix bias2_ols;
};

// Loop-based cross statistics.
inline PairOracle pair_stats_loops(const Matrix& x, const Vector& y, const Vector& beta_ols,
                                   const Vector& beta_tsls) {
    const Index n = x.rows(), k = x.cols();
    double cross = 0.0;
    for (Index i = 0; i < n; ++i) {
        double r1 = y(i), r2 = y(i);
        for (Index a = 0; a < k; ++a) {
            r1 -= x(i, a) * beta_ols(a);
            r2 -= x(i, a) * beta_tsls(a);
        }
        cross += r1 * r2;
    }
    PairOracle o;
    o.sigma2_cross = cross / static_cast<double>(n - k);
    o.cov_cross = o.sigma2_cross * invert(x.transpose() * x);
    Matrix bias2(k, k);
    for (Index a = 0; a < k; ++a) {
        for (Index b = 0; b < k; ++b) {
            bias2(a, b) = (beta_ols(a) - beta_tsls(a)) * (beta_ols(b) - beta_tsls(b));
        }
    }
    o.bias2_ols = bias2;
    return o;
}

inline double min_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
    return solver.eigenvalues().minCoeff();
}

inline double rel_err(double got, double want) {
    const double scale = std::max(1.0, std::abs(want));
    return std::abs(got - want) / scale;
}

}  // namespace oracles
