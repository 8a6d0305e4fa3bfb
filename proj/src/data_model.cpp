#include "clsiv/data_model.hpp"

#include <string>
#include <utility>

namespace clsiv {

Dataset::Dataset(Vector y_in, Matrix x_in, Matrix z_in)
    : y(std::move(y_in)), X(std::move(x_in)), Z(std::move(z_in)) {
    const Index n = y.size();
    if (X.rows() != n || Z.rows() != n) {
        throw validation_error("Dataset: row mismatch (y " + std::to_string(n) + ", X " +
                               std::to_string(X.rows()) + ", Z " + std::to_string(Z.rows()) + ")");
    }
    if (k() < 1 || l() < 1) throw validation_error("Dataset: X and Z need at least one column");
    if (n <= k()) {
        throw validation_error("Dataset: need n > k (n=" + std::to_string(n) +
                               ", k=" + std::to_string(k()) + ")");
    }
    if (n <= l()) {
        throw validation_error("Dataset: need n > l (n=" + std::to_string(n) +
                               ", l=" + std::to_string(l()) + ")");
    }
    if (l() < k()) {
        throw validation_error("Dataset: order condition l >= k violated (l=" +
                               std::to_string(l()) + ", k=" + std::to_string(k()) + ")");
    }
    if (!y.allFinite() || !X.allFinite() || !Z.allFinite()) {
        throw validation_error("Dataset: non-finite entries present");
    }
}

Dataset assemble(const PartitionedDataset& p) {
    const Index n = p.n();
    if (p.X1.rows() != n || p.Z1.rows() != n ||
        (p.X2.cols() > 0 && p.X2.rows() != n)) {
        throw validation_error("assemble: block row counts disagree");
    }
    if (p.k1() < 1) throw validation_error("assemble: no endogenous predictors");
    if (p.l1() < p.k1()) {
        throw validation_error("assemble: under-identified, l1=" + std::to_string(p.l1()) +
                               " < k1=" + std::to_string(p.k1()));
    }

    Matrix x2 = p.X2;
    if (p.intercept) {
        x2.conservativeResize(n, x2.cols() + 1);
        x2.col(x2.cols() - 1).setOnes();
    }

    const Index k = p.X1.cols() + x2.cols();
    const Index l = p.Z1.cols() + x2.cols();
    Matrix x(n, k);
    x.leftCols(p.X1.cols()) = p.X1;
    if (x2.cols() > 0) x.rightCols(x2.cols()) = x2;
    Matrix z(n, l);
    z.leftCols(p.Z1.cols()) = p.Z1;
    if (x2.cols() > 0) z.rightCols(x2.cols()) = x2;

    return Dataset(p.y, std::move(x), std::move(z));
}

}  // namespace clsiv
