#include "clsiv/cls.hpp"

#include <algorithm>
#include <cmath>

#include "clsiv/bootstrap.hpp"

namespace clsiv {

const char* to_string(Unbiased u) {
    switch (u) {
        case Unbiased::Tsls: return "TSLS";
        case Unbiased::Jive: return "JIVE";
    }
    return "?";
}

MseParts MseParts::from(const Matrix& var_ols, const Matrix& var_unbiased,
                        const Matrix& cov_cross, const Matrix& bias2_ols) {
    MseParts p;
    p.var_ols = var_ols;
    p.var_unbiased = var_unbiased;
    p.cov_cross = cov_cross;
    p.bias2_ols = bias2_ols;
    p.t_var_unbiased = var_unbiased.trace();
    p.t_cov = cov_cross.trace();
    p.t_mse_ols = var_ols.trace() + bias2_ols.trace();
    if (!std::isfinite(p.t_var_unbiased) || !std::isfinite(p.t_cov) ||
        !std::isfinite(p.t_mse_ols)) {
        throw validation_error("MseParts: non-finite trace");
    }
    return p;
}

double empirical_mse_trace(const MseParts& parts, double pi) {
    if (!(pi >= 0.0 && pi <= 1.0)) {
        throw validation_error("empirical_mse_trace: pi must lie in [0,1]");
    }
    return pi * pi * parts.t_mse_ols + 2.0 * pi * (1.0 - pi) * parts.t_cov +
           (1.0 - pi) * (1.0 - pi) * parts.t_var_unbiased;
}

PiEstimate estimate_pi(const MseParts& parts) {
    const double numerator = parts.t_var_unbiased - parts.t_cov;
    const double denominator = parts.t_var_unbiased - 2.0 * parts.t_cov + parts.t_mse_ols;
    const double scale =
        std::max({std::abs(parts.t_var_unbiased), std::abs(parts.t_mse_ols), 1.0});

    PiEstimate est;
    if (std::abs(denominator) <= 1e-12 * scale) {
        // Equal-RMSE degeneracy: the quadratic is flat, pin the pure
        // unbiased endpoint to preserve consistency.
        est.pi = 0.0;
        est.degenerate = true;
        return est;
    }
    est.pi = std::clamp(numerator / denominator, 0.0, 1.0);
    return est;
}

ClsResult fit_cls(const Dataset& d, Unbiased unbiased, const BootstrapPlan* plan) {
    ClsResult r;
    r.endpoint_ols = fit_ols(d);

    if (unbiased == Unbiased::Tsls) {
        r.endpoint_unbiased = fit_tsls(d);
        const PairStats ps = pair_stats(d, r.endpoint_ols, r.endpoint_unbiased);
        r.parts = MseParts::from(r.endpoint_ols.cov_beta, r.endpoint_unbiased.cov_beta,
                                 ps.cov_cross, ps.bias2_ols);
        const PiEstimate est = estimate_pi(r.parts);
        r.pi_hat = est.pi;
        r.degenerate = est.degenerate;
    } else {
        if (plan == nullptr) {
            throw validation_error(
                "fit_cls: the JIVE endpoint has no closed-form proportion; supply a "
                "BootstrapPlan");
        }
        r.endpoint_unbiased = fit_jive(d);
        auto [est, moments] = bootstrap_pi(d, unbiased, *plan);
        r.parts = *moments.mse_parts_star;
        r.pi_hat = est.pi;
        r.degenerate = est.degenerate;
    }

    r.beta_cls = r.pi_hat * r.endpoint_ols.beta + (1.0 - r.pi_hat) * r.endpoint_unbiased.beta;
    r.mse_at_pi = empirical_mse_trace(r.parts, r.pi_hat);
    if (auto caveat = moment_caveat(d); !caveat.empty()) r.warnings.push_back(caveat);
    return r;
}

}  // namespace clsiv
