#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clsiv/bootstrap.hpp"
#include "clsiv/rng.hpp"

namespace clsiv {

enum class Model { I, II };

/// Configuration of one synthetic-data scenario. Both models are
/// standardized: Var(X) = Var(Y) = 1 with standard-normal instruments and
/// confounder, which pins the error variances as functions of the
/// confounding strength alpha and the instrument strength gamma:
///   sigma2_eps   = 1 - beta^2 - alpha^2 (1 + 2 beta)   (= 3/4 - 2 alpha^2 at beta = 1/2)
///   sigma2_delta = 1 - (gamma^2 + alpha^2)
/// Positivity of these variances bounds alpha (alpha < sqrt(3/8) at the
/// default beta) and gamma (gamma < sqrt(1 - alpha^2)).
struct ScenarioSpec {
    Model model = Model::I;
    double alpha = 0.0;       // Cor(X, U), magnitude of the confounding
    double gamma = 0.3;       // Cor(X, Z) (Model I) / multiple correlation (Model II)
    Index n = 100;            // sample size per draw
    Index l = 1;              // instrument count (Model II; Model I fixes l = 1)
    double beta_true = 0.5;   // structural coefficient
    int iterations = 1000;    // Monte Carlo repetitions T
    std::uint64_t seed = 0;

    double sigma2_eps() const { return 1.0 - beta_true * beta_true - alpha * alpha * (1.0 + 2.0 * beta_true); }
    double sigma2_delta() const { return 1.0 - (gamma * gamma + alpha * alpha); }
    double lambda() const;  // per-instrument loading gamma / sqrt(l)

    /// Throws validation_error naming the violated inequality.
    void validate() const;
};

/// One synthetic dataset from Model I (single instrument, k = 1, l = 1).
Dataset draw_model_i(const ScenarioSpec& spec, RngStream& stream);

/// One synthetic dataset from Model II (l uncorrelated instruments, k = 1).
/// With l = 1 the draw sequence coincides with Model I for the same stream.
Dataset draw_model_ii(const ScenarioSpec& spec, RngStream& stream);

/// Dispatch on spec.model.
Dataset draw(const ScenarioSpec& spec, RngStream& stream);

enum class Method { Ols, Tsls, Jive, ClsTsls, ClsJive };

const char* to_string(Method m);
Method method_from_string(const std::string& name);

struct MethodSpec {
    Method method = Method::Ols;
    int bootstrap_reps = 100;  // used by cls-jive only
};

/// Monte Carlo summary of one estimator over the empirical distribution of
/// T draws: bias, variance, and MSE relative to the true coefficient, all as
/// moments of the EDF (divisor T over the successful iterations, so
/// mse = variance + bias bias' holds exactly).
struct McSummary {
    Method method = Method::Ols;
    Vector bias;          // mean(beta_hat) - beta_true
    Matrix variance;      // EDF variance
    Matrix mse;           // EDF mean squared error
    double mean_abs_err = 0.0;  // mean ||beta_hat - beta_true||
    int iterations = 0;   // requested T
    int failures = 0;     // iterations where this estimator failed

    double bias_norm() const { return bias.norm(); }
    double sd() const { return std::sqrt(variance.trace()); }
    double rmse() const { return std::sqrt(mse.trace()); }
};

/// Runs T independent draws (streams keyed by (seed, iteration)), fits every
/// requested estimator on each draw, and accumulates the EDF moments.
/// Iterations where an estimator fails are excluded for that estimator and
/// counted. Aggregation is iteration-ordered with compensated summation, so
/// results do not depend on the worker count.
std::vector<McSummary> run_monte_carlo(const ScenarioSpec& spec,
                                       const std::vector<MethodSpec>& methods,
                                       int workers = 1);

/// Long-format CSV: scenario columns, estimator, statistic (bias|sd|rmse),
/// value. One row per cell, directly plottable. Writes a header when
/// with_header is set.
void write_mc_csv(std::ostream& out, const ScenarioSpec& spec,
                  const std::vector<McSummary>& summaries, bool with_header);

}  // namespace clsiv
