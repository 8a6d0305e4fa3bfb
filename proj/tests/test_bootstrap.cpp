#include <cmath>

#include "clsiv/bootstrap.hpp"
#include "clsiv/rng.hpp"
#include "clsiv/simulation.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace clsiv;

namespace {

Dataset model_i_draw(double alpha, double gamma, Index n, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.alpha = alpha;
    spec.gamma = gamma;
    spec.n = n;
    spec.seed = seed;
    RngStream stream(substream(seed, 0));
    return draw_model_i(spec, stream);
}

Dataset model_ii_draw(double alpha, double gamma, Index n, Index l, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.model = Model::II;
    spec.alpha = alpha;
    spec.gamma = gamma;
    spec.n = n;
    spec.l = l;
    spec.seed = seed;
    RngStream stream(substream(seed, 0));
    return draw_model_ii(spec, stream);
}

MseParts scalar_parts(double t_mse_ols, double t_cov, double t_var_unbiased) {
    return MseParts::from(Matrix::Constant(1, 1, t_mse_ols), Matrix::Constant(1, 1, t_var_unbiased),
                          Matrix::Constant(1, 1, t_cov), Matrix::Zero(1, 1));
}

}  // namespace

TEST_CASE("plan index streams are reproducible and replicate-distinct") {
    BootstrapPlan plan{100, 99};
    CHECK(plan.indices(3, 25) == plan.indices(3, 25));
    CHECK(plan.indices(3, 25) != plan.indices(4, 25));
    BootstrapPlan other{100, 100};
    CHECK(plan.indices(3, 25) != other.indices(3, 25));
    for (Index i : plan.indices(0, 25)) {
        CHECK(i >= 0);
        CHECK(i < 25);
    }
}

TEST_CASE("noise-free data has zero bootstrap variance") {
    Matrix x(6, 1);
    x << 1, 2, 3, 4, 5, 6;
    const Vector y = 2.0 * x.col(0);
    const Dataset d(y, x, x);
    const BootstrapMoments m = bootstrap_variance_cls(d, BootstrapPlan{50, 7});
    CHECK(m.failures == 0);
    CHECK(m.mean(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(m.cov(0, 0)) < 1e-20);
}

TEST_CASE("identical replicates give exactly zero covariance") {
    // Every case triple is the same, so any resample reproduces the dataset
    // and both replicates of a B = 2 plan coincide.
    const Dataset d(Vector::Constant(5, 3.0), Matrix::Constant(5, 1, 2.0),
                    Matrix::Constant(5, 1, 2.0));
    const BootstrapMoments m = bootstrap_variance_cls(d, BootstrapPlan{2, 11});
    CHECK(m.cov(0, 0) == 0.0);
    CHECK(m.mean(0) == doctest::Approx(1.5).epsilon(1e-14));

    const auto [est, pm] = bootstrap_pi(d, Unbiased::Tsls, BootstrapPlan{8, 12});
    CHECK(est.degenerate);
    CHECK(est.pi == 0.0);
}

TEST_CASE("bootstrap moments are independent of the worker count") {
    const Dataset d = model_i_draw(0.25, 0.5, 60, 1234);
    const BootstrapPlan plan{64, 321};
    const auto [est1, m1] = bootstrap_pi(d, Unbiased::Tsls, plan, /*workers=*/1);
    const auto [est2, m2] = bootstrap_pi(d, Unbiased::Tsls, plan, /*workers=*/2);
    CHECK(est1.pi == est2.pi);
    CHECK(m1.mean == m2.mean);
    CHECK(m1.cov == m2.cov);
    CHECK(m1.mse_parts_star->t_cov == m2.mse_parts_star->t_cov);

    const BootstrapMoments v1 = bootstrap_variance_cls(d, plan, Unbiased::Tsls, 1);
    const BootstrapMoments v2 = bootstrap_variance_cls(d, plan, Unbiased::Tsls, 2);
    CHECK(v1.mean == v2.mean);
    CHECK(v1.cov == v2.cov);
}

TEST_CASE("bootstrap moments match a direct replicate-level recomputation") {
    const Dataset d = model_i_draw(0.3, 0.4, 40, 555);
    const BootstrapPlan plan{12, 99};
    const BootstrapMoments m = bootstrap_variance_cls(d, plan);
    REQUIRE(m.failures == 0);

    std::vector<double> betas;
    for (int b = 0; b < plan.B; ++b) {
        const auto idx = plan.indices(b, d.n());
        Vector y(d.n());
        Matrix x(d.n(), 1), z(d.n(), 1);
        for (Index i = 0; i < d.n(); ++i) {
            y(i) = d.y(idx[i]);
            x.row(i) = d.X.row(idx[i]);
            z.row(i) = d.Z.row(idx[i]);
        }
        betas.push_back(fit_cls(Dataset(y, x, z)).beta_cls(0));
    }
    double mean = 0.0;
    for (double b : betas) mean += b;
    mean /= plan.B;
    double var = 0.0;
    for (double b : betas) var += (b - mean) * (b - mean);
    var /= plan.B - 1;  // divisor B - 1

    CHECK(m.mean(0) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(m.cov(0, 0) == doctest::Approx(var).epsilon(1e-12));
    CHECK(static_cast<Index>(m.pi_values.size()) == plan.B);
}

TEST_CASE("bootstrap pi approaches the closed-form proportion") {
    const Dataset d = model_i_draw(0.4, 0.5, 500, 2027);
    const ClsResult closed = fit_cls(d);
    const auto [est, moments] = bootstrap_pi(d, Unbiased::Tsls, BootstrapPlan{2000, 17}, 2);
    CHECK(moments.failures == 0);
    CHECK(std::abs(est.pi - closed.pi_hat) < 0.1);
}

TEST_CASE("optimality check holds at the estimated proportion") {
    const Dataset d = model_ii_draw(0.4, 0.5, 120, 10, 808);
    const auto [est, moments] = bootstrap_pi(d, Unbiased::Jive, BootstrapPlan{100, 5});
    CHECK(bootstrap_mse_optimality_check(moments, est.pi));
}

TEST_CASE("optimality check rejects a forced non-minimizer") {
    BootstrapMoments m;
    m.mse_parts_star = scalar_parts(3.0, 1.0, 2.0);  // f(1) = 3 > min(3, 2)
    CHECK_FALSE(bootstrap_mse_optimality_check(m, 1.0));
    CHECK(bootstrap_mse_optimality_check(m, estimate_pi(*m.mse_parts_star).pi));

    BootstrapMoments empty;
    CHECK_THROWS_AS(bootstrap_mse_optimality_check(empty, 0.5), validation_error);
}

TEST_CASE("failed replicates are dropped and counted") {
    // A single informative instrument row: resamples that miss row 0 have a
    // zero instrument column and fail inside fit_tsls.
    const Index n = 10;
    Matrix z = Matrix::Zero(n, 1);
    z(0, 0) = 1.0;
    Matrix x = Matrix::Ones(n, 1);
    RngStream s(substream(606, 0));
    Vector y(n);
    for (Index i = 0; i < n; ++i) y(i) = 1.0 + 0.1 * s.normal();
    const Dataset d(y, x, z);

    const BootstrapMoments m = bootstrap_variance_cls(d, BootstrapPlan{40, 3});
    CHECK(m.failures > 0);
    CHECK(m.failures < 20);  // roughly (1 - 1/n)^n of the replicates
    CHECK(m.successes() == 40 - m.failures);
    CHECK(std::isfinite(m.mean(0)));
}

TEST_CASE("excess failures abort with diagnostics") {
    // With the JIVE endpoint the spiked design also fails when row 0 appears
    // exactly once (its leverage is then 1), so most replicates fail.
    const Index n = 10;
    Matrix z = Matrix::Zero(n, 1);
    z(0, 0) = 1.0;
    Matrix x = Matrix::Ones(n, 1);
    RngStream s(substream(607, 0));
    Vector y(n);
    for (Index i = 0; i < n; ++i) y(i) = 1.0 + 0.1 * s.normal();
    const Dataset d(y, x, z);

    try {
        bootstrap_pi(d, Unbiased::Jive, BootstrapPlan{50, 4});
        FAIL("expected bootstrap_error");
    } catch (const bootstrap_error& e) {
        CHECK(e.failures > 25);
        CHECK(e.replicates == 50);
    }
}

TEST_CASE("bootstrap sd tracks the Monte Carlo sd") {
    // Frozen oracle: sd of the CLS estimate over 1000 independent Model I
    // draws (n = 200, alpha = 0.25, gamma = 0.5, seed = 9001).
    const double mc_sd = 0.095707480868035683;

    ScenarioSpec spec;
    spec.alpha = 0.25;
    spec.gamma = 0.5;
    spec.n = 200;
    for (std::uint64_t ds = 0; ds < 3; ++ds) {
        RngStream s(substream(777, ds));
        const Dataset d = draw_model_i(spec, s);
        const BootstrapMoments m = bootstrap_variance_cls(d, BootstrapPlan{200, 55});
        const double boot_sd = std::sqrt(m.cov(0, 0));
        CHECK(boot_sd > 0.7 * mc_sd);
        CHECK(boot_sd < 1.3 * mc_sd);
    }
}

TEST_CASE("B below 2 is rejected") {
    const Dataset d = model_i_draw(0.25, 0.5, 30, 21);
    CHECK_THROWS_AS(bootstrap_variance_cls(d, BootstrapPlan{1, 0}), validation_error);
    CHECK_THROWS_AS(bootstrap_pi(d, Unbiased::Tsls, BootstrapPlan{1, 0}), validation_error);
}
