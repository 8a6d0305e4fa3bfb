#include "clsiv/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace clsiv {

const char* to_string(EstimatorTag tag) {
    switch (tag) {
        case EstimatorTag::Ols: return "OLS";
        case EstimatorTag::Tsls: return "TSLS";
        case EstimatorTag::Jive: return "JIVE";
    }
    return "?";
}

namespace {

double residual_variance(const Dataset& d, const Vector& beta) {
    const Vector resid = d.y - d.X * beta;
    return resid.squaredNorm() / static_cast<double>(d.n() - d.k());
}

}  // namespace

FitResult fit_ols(const Dataset& d) {
    LeastSquares ls(d.X);
    FitResult r;
    r.tag = EstimatorTag::Ols;
    r.dof = d.n() - d.k();
    r.beta = ls.solve(d.y);
    r.sigma2 = residual_variance(d, r.beta);
    r.cov_beta = r.sigma2 * ls.gram_inverse();
    return r;
}

FitResult fit_tsls(const Dataset& d) {
    const ProjectionCache proj(d.Z);
    const Matrix x_hat = proj.apply(d.X);
    LeastSquares ls(x_hat);
    if (!ls.full_rank()) {
        throw singular_error(
            "fit_tsls: projected design X_hat is rank deficient (weak or collinear "
            "instruments), estimated rank " +
                std::to_string(ls.rank()) + " < " + std::to_string(d.k()) +
                ", condition estimate " + std::to_string(ls.condition_estimate()),
            ls.rank(), d.k(), ls.condition_estimate());
    }
    FitResult r;
    r.tag = EstimatorTag::Tsls;
    r.dof = d.n() - d.k();
    r.beta = ls.solve(d.y);
    // Second-stage residuals use the original X, not X_hat.
    r.sigma2 = residual_variance(d, r.beta);
    r.cov_beta = r.sigma2 * ls.gram_inverse();
    return r;
}

FitResult fit_jive(const Dataset& d) {
    const ProjectionCache proj(d.Z);
    const Vector& h = proj.leverages();
    for (Index i = 0; i < d.n(); ++i) {
        if (h(i) >= 1.0 - 1e-12) {
            throw numeric_error("fit_jive: leverage h_" + std::to_string(i) + " = " +
                                std::to_string(h(i)) +
                                "; data point determines its own first stage");
        }
    }

    const Matrix x_hat = proj.apply(d.X);
    Matrix x_jack(d.n(), d.k());
    for (Index i = 0; i < d.n(); ++i) {
        x_jack.row(i) = (x_hat.row(i) - h(i) * d.X.row(i)) / (1.0 - h(i));
    }

    const Matrix m = x_jack.transpose() * d.X;  // k x k
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(static_cast<double>(d.k()) * std::numeric_limits<double>::epsilon());
    if (qr.rank() < d.k()) {
        throw singular_error("fit_jive: XJ'X is rank deficient, estimated rank " +
                                 std::to_string(qr.rank()) + " < " + std::to_string(d.k()),
                             qr.rank(), d.k(),
                             std::numeric_limits<double>::infinity());
    }

    FitResult r;
    r.tag = EstimatorTag::Jive;
    r.dof = d.n() - d.k();
    r.beta = qr.solve(x_jack.transpose() * d.y);
    r.sigma2 = residual_variance(d, r.beta);
    const Matrix m_inv = qr.inverse();
    Matrix cov = r.sigma2 * m_inv * (x_jack.transpose() * x_jack) * m_inv.transpose();
    r.cov_beta = (cov + cov.transpose()) / 2.0;
    return r;
}

PairStats pair_stats(const Dataset& d, const FitResult& ols, const FitResult& tsls) {
    if (ols.beta.size() != d.k() || tsls.beta.size() != d.k()) {
        throw validation_error("pair_stats: fit dimensions do not match the dataset");
    }
    const Vector resid_ols = d.y - d.X * ols.beta;
    const Vector resid_tsls = d.y - d.X * tsls.beta;

    PairStats s;
    s.sigma2_cross = resid_ols.dot(resid_tsls) / static_cast<double>(d.n() - d.k());
    s.cov_cross = s.sigma2_cross * LeastSquares(d.X).gram_inverse();
    const Vector diff = ols.beta - tsls.beta;
    s.bias2_ols = diff * diff.transpose();
    return s;
}

std::string moment_caveat(const Dataset& d) {
    if (d.l() >= d.k() + 2) return {};
    return "l = " + std::to_string(d.l()) + " < k + 2 = " + std::to_string(d.k() + 2) +
           ": TSLS finite-sample first/second moments may not exist; asymptotic moments apply";
}

}  // namespace clsiv
