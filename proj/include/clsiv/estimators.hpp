#pragma once

#include <string>

#include "clsiv/data_model.hpp"

namespace clsiv {

enum class EstimatorTag { Ols, Tsls, Jive };

const char* to_string(EstimatorTag tag);

/// Point estimate plus the closed-form second-moment quantities.
/// sigma2 is the relevant residual variance with divisor n - k; for TSLS and
/// JIVE the residuals use the original X, not the projected first stage.
struct FitResult {
    Vector beta;
    Matrix cov_beta;
    double sigma2 = 0.0;
    EstimatorTag tag = EstimatorTag::Ols;
    Index dof = 0;  // n - k
};

/// Joint OLS/TSLS statistics: the cross-RSS, the cross-covariance in its
/// simplified hat-matrix form, and the rank-one empirical squared bias of
/// the OLS estimator (the Hausman-test numerator).
struct PairStats {
    Matrix cov_cross;     // sigma2_cross * (X'X)^{-1}
    double sigma2_cross;  // (n-k)^{-1} sum_i (y_i - x_i b_ols)(y_i - x_i b_tsls)
    Matrix bias2_ols;     // (b_ols - b_tsls)(b_ols - b_tsls)'
};

/// OLS: beta = argmin ||y - X b||. Requires rank(X) = k.
FitResult fit_ols(const Dataset& d);

/// TSLS: beta = (Xhat' Xhat)^{-1} Xhat' y with Xhat the projection of X onto
/// col(Z). Rank deficiency of Z or of the projected design (weak-instrument
/// degeneracy) raises singular_error with condition diagnostics.
FitResult fit_tsls(const Dataset& d);

/// JIVE: first-stage fitted values recomputed without each data point via the
/// leverage shortcut (z_i G - h_i x_i) / (1 - h_i). Any h_i >= 1 - 1e-12 is an
/// error. Covariance is the sandwich M^{-1} (XJ'XJ) M^{-T} scaled by sigma2,
/// with M = XJ'X; the bootstrap is the documented authoritative variance path.
FitResult fit_jive(const Dataset& d);

/// Cross statistics of OLS and TSLS fits obtained from the same dataset.
PairStats pair_stats(const Dataset& d, const FitResult& ols, const FitResult& tsls);

/// Finite-sample moment caveat: TSLS first and second moments need
/// l >= k + 2. Returns a warning string when the condition fails, else empty.
std::string moment_caveat(const Dataset& d);

}  // namespace clsiv
