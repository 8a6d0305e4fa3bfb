#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "clsiv/cls.hpp"

namespace clsiv {

/// Deterministic case-resampling plan. Replicate b draws its index multiset
/// from a stream keyed by hash(seed, b), so the index streams depend only on
/// (seed, B, n) and never on the worker count or execution order.
struct BootstrapPlan {
    int B = 100;
    std::uint64_t seed = 0;

    /// n indices sampled with replacement from [0, n) for replicate b.
    std::vector<Index> indices(int b, Index n) const;
};

/// First and second bootstrap moments of an estimator, plus the bootstrap
/// analogue of the MSE decomposition when a pair of estimators was tracked.
/// Covariances use divisor B - 1 over the successful replicates. Replicates
/// whose resampled design was singular are dropped and counted in failures.
struct BootstrapMoments {
    Vector mean;  // E*[.]
    Matrix cov;   // Var*, divisor B-1
    std::optional<MseParts> mse_parts_star;
    int failures = 0;
    int replicates = 0;        // requested B
    Vector pi_values;          // per successful replicate, where applicable
    Matrix replicate_values;   // k x successes, replicate order

    int successes() const { return replicates - failures; }
};

/// Case-bootstrap moments of an arbitrary estimator. The callback fits one
/// resampled dataset and returns the coefficient vector; numeric failures
/// drop the replicate.
BootstrapMoments bootstrap_moments(const Dataset& d, const BootstrapPlan& plan,
                                   const std::function<Vector(const Dataset&)>& fit,
                                   int workers = 1);

/// Bootstrap distribution of the full CLS fit: every replicate re-estimates
/// its own proportion, which is exactly what the closed-form variance leaves
/// out. More than B/2 failed replicates aborts with diagnostics.
BootstrapMoments bootstrap_variance_cls(const Dataset& d, const BootstrapPlan& plan,
                                        Unbiased unbiased = Unbiased::Tsls,
                                        int workers = 1);

/// Bootstrap proportion for an arbitrary unbiased endpoint: the closed-form
/// recipe with every empirical moment replaced by its bootstrap equivalent,
/// the OLS bias measured against E*[unbiased]. Returns the clamped minimizer
/// and the moment bundle (mean/cov describe the resulting CLS combination).
std::pair<PiEstimate, BootstrapMoments> bootstrap_pi(const Dataset& d, Unbiased unbiased,
                                                     const BootstrapPlan& plan,
                                                     int workers = 1);

/// True iff the bootstrap MSE trace of the combination at pi_star does not
/// exceed the better endpoint by more than 1e-10. Exported as a test hook;
/// holds algebraically for the constrained minimizer.
bool bootstrap_mse_optimality_check(const BootstrapMoments& moments, double pi_star);

}  // namespace clsiv
