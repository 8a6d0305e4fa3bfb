#include "clsiv/simulation.hpp"

#include <cmath>
#include <ostream>
#include <utility>

#include "clsiv/csv_io.hpp"
#include "clsiv/parallel.hpp"

namespace clsiv {

namespace {

constexpr std::uint64_t kClsJivePlanDomain = 0x6d636a76u;  // per-iteration nested plans

}  // namespace

double ScenarioSpec::lambda() const {
    return gamma / std::sqrt(static_cast<double>(model == Model::II ? l : 1));
}

void ScenarioSpec::validate() const {
    if (alpha < 0.0) throw validation_error("alpha must be nonnegative");
    if (sigma2_eps() <= 0.0) {
        if (beta_true == 0.5) {
            throw validation_error("alpha must satisfy alpha < sqrt(3/8)");
        }
        throw validation_error(
            "alpha must satisfy alpha^2 < (1 - beta^2) / (1 + 2 beta) = " +
            std::to_string((1.0 - beta_true * beta_true) / (1.0 + 2.0 * beta_true)));
    }
    if (gamma <= 0.0) throw validation_error("gamma must be positive");
    if (sigma2_delta() <= 0.0) {
        throw validation_error("gamma must satisfy gamma < sqrt(1 - alpha^2)");
    }
    const Index instruments = model == Model::II ? l : 1;
    if (model == Model::II && l < 1) throw validation_error("Model II requires l >= 1");
    if (n <= instruments || n <= 1) {
        throw validation_error("n must exceed the instrument count and the predictor count");
    }
}

namespace {

Dataset draw_common(const ScenarioSpec& spec, RngStream& stream, Index l) {
    const double sd_eps = std::sqrt(spec.sigma2_eps());
    const double sd_delta = std::sqrt(spec.sigma2_delta());
    const double loading = spec.gamma / std::sqrt(static_cast<double>(l));

    Vector y(spec.n);
    Matrix x(spec.n, 1);
    Matrix z(spec.n, l);
    for (Index i = 0; i < spec.n; ++i) {
        double z_sum = 0.0;
        for (Index j = 0; j < l; ++j) {
            z(i, j) = stream.normal();
            z_sum += z(i, j);
        }
        const double u = stream.normal();
        const double delta = sd_delta * stream.normal();
        const double eps = sd_eps * stream.normal();
        x(i, 0) = loading * z_sum + spec.alpha * u + delta;
        y(i) = x(i, 0) * spec.beta_true + spec.alpha * u + eps;
    }
    return Dataset(std::move(y), std::move(x), std::move(z));
}

}  // namespace

Dataset draw_model_i(const ScenarioSpec& spec, RngStream& stream) {
    spec.validate();
    return draw_common(spec, stream, 1);
}

Dataset draw_model_ii(const ScenarioSpec& spec, RngStream& stream) {
    spec.validate();
    return draw_common(spec, stream, spec.l);
}

Dataset draw(const ScenarioSpec& spec, RngStream& stream) {
    return spec.model == Model::I ? draw_model_i(spec, stream) : draw_model_ii(spec, stream);
}

const char* to_string(Method m) {
    switch (m) {
        case Method::Ols: return "ols";
        case Method::Tsls: return "tsls";
        case Method::Jive: return "jive";
        case Method::ClsTsls: return "cls-tsls";
        case Method::ClsJive: return "cls-jive";
    }
    return "?";
}

Method method_from_string(const std::string& name) {
    if (name == "ols") return Method::Ols;
    if (name == "tsls") return Method::Tsls;
    if (name == "jive") return Method::Jive;
    if (name == "cls-tsls") return Method::ClsTsls;
    if (name == "cls-jive") return Method::ClsJive;
    throw validation_error("unknown estimator '" + name +
                           "' (expected ols, tsls, jive, cls-tsls, cls-jive)");
}

namespace {

Vector fit_method(const MethodSpec& m, const Dataset& d, const ScenarioSpec& spec,
                  std::uint64_t iteration) {
    switch (m.method) {
        case Method::Ols: return fit_ols(d).beta;
        case Method::Tsls: return fit_tsls(d).beta;
        case Method::Jive: return fit_jive(d).beta;
        case Method::ClsTsls: return fit_cls(d).beta_cls;
        case Method::ClsJive: {
            BootstrapPlan plan;
            plan.B = m.bootstrap_reps;
            plan.seed = substream(substream(spec.seed, kClsJivePlanDomain), iteration);
            return fit_cls(d, Unbiased::Jive, &plan).beta_cls;
        }
    }
    throw validation_error("fit_method: unhandled estimator");
}

}  // namespace

std::vector<McSummary> run_monte_carlo(const ScenarioSpec& spec,
                                       const std::vector<MethodSpec>& methods, int workers) {
    spec.validate();
    if (spec.iterations < 2) throw validation_error("run_monte_carlo: T >= 2 required");
    if (methods.empty()) throw validation_error("run_monte_carlo: no estimators requested");

    const std::size_t T = static_cast<std::size_t>(spec.iterations);
    const std::size_t M = methods.size();

    struct Cell {
        bool ok = false;
        double beta = 0.0;  // models are univariate
    };
    std::vector<Cell> cells(T * M);

    parallel_for_indexed(T, workers, [&](std::size_t t) {
        RngStream stream(substream(spec.seed, t));
        const Dataset d = draw(spec, stream);
        for (std::size_t m = 0; m < M; ++m) {
            try {
                const Vector beta = fit_method(methods[m], d, spec, t);
                cells[t * M + m] = {true, beta(0)};
            } catch (const numeric_error&) {
                cells[t * M + m].ok = false;
            }
        }
    });

    std::vector<McSummary> out(M);
    for (std::size_t m = 0; m < M; ++m) {
        KahanSum sum;
        int successes = 0;
        for (std::size_t t = 0; t < T; ++t) {
            if (!cells[t * M + m].ok) continue;
            sum.add(cells[t * M + m].beta);
            ++successes;
        }
        if (successes == 0) {
            throw numeric_error(std::string("run_monte_carlo: every iteration failed for ") +
                                to_string(methods[m].method));
        }
        const double mean = sum.sum / successes;

        KahanSum var_sum, mse_sum, abs_sum;
        for (std::size_t t = 0; t < T; ++t) {
            if (!cells[t * M + m].ok) continue;
            const double b = cells[t * M + m].beta;
            var_sum.add((b - mean) * (b - mean));
            mse_sum.add((b - spec.beta_true) * (b - spec.beta_true));
            abs_sum.add(std::abs(b - spec.beta_true));
        }

        McSummary s;
        s.method = methods[m].method;
        s.bias = Vector::Constant(1, mean - spec.beta_true);
        s.variance = Matrix::Constant(1, 1, var_sum.sum / successes);
        s.mse = Matrix::Constant(1, 1, mse_sum.sum / successes);
        s.mean_abs_err = abs_sum.sum / successes;
        s.iterations = spec.iterations;
        s.failures = spec.iterations - successes;
        out[m] = std::move(s);
    }
    return out;
}

void write_mc_csv(std::ostream& out, const ScenarioSpec& spec,
                  const std::vector<McSummary>& summaries, bool with_header) {
    if (with_header) out << "model,alpha,gamma,n,l,T,seed,estimator,statistic,value\n";
    const std::string prefix = std::string(spec.model == Model::I ? "I" : "II") + "," +
                               format_double(spec.alpha) + "," + format_double(spec.gamma) +
                               "," + std::to_string(spec.n) + "," +
                               std::to_string(spec.model == Model::II ? spec.l : 1) + "," +
                               std::to_string(spec.iterations) + "," +
                               std::to_string(spec.seed);
    for (const auto& s : summaries) {
        const double bias_value = s.bias.size() == 1 ? s.bias(0) : s.bias_norm();
        out << prefix << "," << to_string(s.method) << ",bias," << format_double(bias_value)
            << "\n";
        out << prefix << "," << to_string(s.method) << ",sd," << format_double(s.sd()) << "\n";
        out << prefix << "," << to_string(s.method) << ",rmse," << format_double(s.rmse())
            << "\n";
    }
}

}  // namespace clsiv
