#pragma once

#include <Eigen/Dense>

#include "clsiv/errors.hpp"
#include "clsiv/linalg.hpp"

namespace clsiv {

/// Immutable estimation input: response y (n), predictors X (n x k),
/// instruments Z (n x l). Construction enforces n > k, n > l, the order
/// condition l >= k, and finiteness of every entry. Rank is not checked
/// here; solvers report rank deficiency where it occurs.
struct Dataset {
    Dataset(Vector y, Matrix x, Matrix z);

    Vector y;
    Matrix X;
    Matrix Z;

    Index n() const { return y.size(); }
    Index k() const { return X.cols(); }
    Index l() const { return Z.cols(); }
};

/// Partitioned form of the block model: endogenous predictors X1, exogenous
/// covariates X2, outside instruments Z1. assemble() produces the blocked
/// Dataset with X = [X1 X2], Z = [Z1 X2].
struct PartitionedDataset {
    Vector y;
    Matrix X1;
    Matrix X2;  // may have zero columns
    Matrix Z1;
    bool intercept = false;

    Index n() const { return y.size(); }
    Index k1() const { return X1.cols(); }
    Index k2() const { return X2.cols() + (intercept ? 1 : 0); }
    Index l1() const { return Z1.cols(); }
};

/// Blocks the partitioned model into a Dataset. Column order is fixed as
/// [endogenous | exogenous], so the coefficient vector reads [beta1' beta2']'.
/// If intercept is set, a constant column is appended to X2 before blocking.
/// Requires l1 >= k1 (identification) and consistent row counts.
Dataset assemble(const PartitionedDataset& p);

}  // namespace clsiv
