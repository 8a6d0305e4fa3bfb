#pragma once

#include <string>
#include <vector>

#include "clsiv/estimators.hpp"

namespace clsiv {

struct BootstrapPlan;  // bootstrap.hpp

/// Which asymptotically unbiased endpoint the convex combination uses.
enum class Unbiased { Tsls, Jive };

const char* to_string(Unbiased u);

/// The three ingredients of the combined-MSE quadratic, kept as full k x k
/// matrices with their traces precomputed. The unbiased endpoint's empirical
/// bias (and with it the cross-bias) is identically zero, so its MSE is its
/// variance and the cross term is the plain covariance.
struct MseParts {
    Matrix var_ols;    // Var(OLS)
    Matrix var_unbiased;  // Var of the unbiased endpoint
    Matrix cov_cross;  // Cov(OLS, unbiased)
    Matrix bias2_ols;  // squared-bias of OLS, rank <= 1

    double t_var_unbiased = 0.0;  // tr Var(unbiased)
    double t_cov = 0.0;           // tr Cov
    double t_mse_ols = 0.0;       // tr Var(OLS) + tr bias2(OLS)

    static MseParts from(const Matrix& var_ols, const Matrix& var_unbiased,
                         const Matrix& cov_cross, const Matrix& bias2_ols);
};

/// Proportion estimate together with its degeneracy marker. Degenerate means
/// the quadratic's curvature is numerically zero (equal RMSEs); the estimate
/// is then pinned at 0, i.e. the pure unbiased endpoint.
struct PiEstimate {
    double pi = 0.0;
    bool degenerate = false;
};

/// Combined result: the convex estimate, the proportion, both endpoint fits,
/// and the MSE pieces behind them.
struct ClsResult {
    Vector beta_cls;
    double pi_hat = 0.0;
    bool degenerate = false;
    MseParts parts;
    FitResult endpoint_ols;
    FitResult endpoint_unbiased;
    double mse_at_pi = 0.0;
    std::vector<std::string> warnings;
};

/// Trace of the empirical MSE of the combination at proportion pi:
/// pi^2 * tr MSE(OLS) + 2 pi (1-pi) * tr Cov + (1-pi)^2 * tr Var(unbiased).
/// pi outside [0,1] is an error.
double empirical_mse_trace(const MseParts& parts, double pi);

/// Closed-form minimizer of empirical_mse_trace over [0,1]:
/// raw pi = (t_var - t_cov) / (t_var - 2 t_cov + t_mse_ols), clamped to the
/// unit interval. Clamping is exact: the objective is a convex quadratic, so
/// the constrained minimizer is the projection of the stationary point.
/// A denominator below 1e-12 * max(|t_var|, |t_mse_ols|, 1) is degenerate.
PiEstimate estimate_pi(const MseParts& parts);

/// Convex least squares. With the TSLS endpoint everything is closed-form.
/// With the JIVE endpoint the proportion has no closed form and is estimated
/// by the bootstrap; a plan is then required.
ClsResult fit_cls(const Dataset& d, Unbiased unbiased = Unbiased::Tsls,
                  const BootstrapPlan* plan = nullptr);

}  // namespace clsiv
