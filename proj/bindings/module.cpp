#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clsiv/bootstrap.hpp"
#include "clsiv/csv_io.hpp"
#include "clsiv/simulation.hpp"
#include "clsiv/version.hpp"

namespace py = pybind11;
using namespace clsiv;

namespace {

Unbiased unbiased_from_string(const std::string& name) {
    if (name == "tsls") return Unbiased::Tsls;
    if (name == "jive") return Unbiased::Jive;
    throw validation_error("unbiased endpoint must be 'tsls' or 'jive'");
}

ScenarioSpec make_spec(const std::string& model, double alpha, double gamma, Index n, Index l,
                       double beta, int iterations, std::uint64_t seed) {
    ScenarioSpec spec;
    if (model == "I") {
        spec.model = Model::I;
    } else if (model == "II") {
        spec.model = Model::II;
    } else {
        throw validation_error("model must be 'I' or 'II'");
    }
    spec.alpha = alpha;
    spec.gamma = gamma;
    spec.n = n;
    spec.l = l;
    spec.beta_true = beta;
    spec.iterations = iterations;
    spec.seed = seed;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Convex least squares: OLS/TSLS/JIVE estimators, the CLS combination, "
              "bootstrap inference, and Monte Carlo simulation";
    m.attr("__version__") = kVersion;

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_RuntimeError);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<Vector, Matrix, Matrix>(), py::arg("y"), py::arg("X"), py::arg("Z"))
        .def_readonly("y", &Dataset::y)
        .def_readonly("X", &Dataset::X)
        .def_readonly("Z", &Dataset::Z)
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("k", &Dataset::k)
        .def_property_readonly("l", &Dataset::l);

    m.def(
        "assemble",
        [](const Vector& y, const Matrix& x1, const Matrix& x2, const Matrix& z1,
           bool intercept) {
            PartitionedDataset p;
            p.y = y;
            p.X1 = x1;
            p.X2 = x2;
            p.Z1 = z1;
            p.intercept = intercept;
            return assemble(p);
        },
        py::arg("y"), py::arg("X1"), py::arg("X2"), py::arg("Z1"), py::arg("intercept") = false,
        "Block the partitioned model into X = [X1 X2], Z = [Z1 X2]");

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("beta", &FitResult::beta)
        .def_readonly("cov_beta", &FitResult::cov_beta)
        .def_readonly("sigma2", &FitResult::sigma2)
        .def_readonly("dof", &FitResult::dof)
        .def_property_readonly("tag", [](const FitResult& r) { return to_string(r.tag); });

    py::class_<PairStats>(m, "PairStats")
        .def_readonly("cov_cross", &PairStats::cov_cross)
        .def_readonly("sigma2_cross", &PairStats::sigma2_cross)
        .def_readonly("bias2_ols", &PairStats::bias2_ols);

    m.def("fit_ols", &fit_ols, py::arg("dataset"));
    m.def("fit_tsls", &fit_tsls, py::arg("dataset"));
    m.def("fit_jive", &fit_jive, py::arg("dataset"));
    m.def("pair_stats", &pair_stats, py::arg("dataset"), py::arg("ols"), py::arg("tsls"));
    m.def("moment_caveat", &moment_caveat, py::arg("dataset"));

    py::class_<MseParts>(m, "MseParts")
        .def_readonly("var_ols", &MseParts::var_ols)
        .def_readonly("var_unbiased", &MseParts::var_unbiased)
        .def_readonly("cov_cross", &MseParts::cov_cross)
        .def_readonly("bias2_ols", &MseParts::bias2_ols)
        .def_readonly("t_var_unbiased", &MseParts::t_var_unbiased)
        .def_readonly("t_cov", &MseParts::t_cov)
        .def_readonly("t_mse_ols", &MseParts::t_mse_ols);

    m.def("empirical_mse_trace", &empirical_mse_trace, py::arg("parts"), py::arg("pi"));
    m.def(
        "estimate_pi",
        [](const MseParts& parts) {
            const PiEstimate est = estimate_pi(parts);
            return py::make_tuple(est.pi, est.degenerate);
        },
        py::arg("parts"), "Returns (pi, degenerate)");

    py::class_<ClsResult>(m, "ClsResult")
        .def_readonly("beta_cls", &ClsResult::beta_cls)
        .def_readonly("pi_hat", &ClsResult::pi_hat)
        .def_readonly("degenerate", &ClsResult::degenerate)
        .def_readonly("parts", &ClsResult::parts)
        .def_readonly("endpoint_ols", &ClsResult::endpoint_ols)
        .def_readonly("endpoint_unbiased", &ClsResult::endpoint_unbiased)
        .def_readonly("mse_at_pi", &ClsResult::mse_at_pi)
        .def_readonly("warnings", &ClsResult::warnings);

    m.def(
        "fit_cls",
        [](const Dataset& d, const std::string& unbiased, int bootstrap_reps,
           std::uint64_t seed) {
            const Unbiased u = unbiased_from_string(unbiased);
            if (u == Unbiased::Tsls) return fit_cls(d);
            const BootstrapPlan plan{bootstrap_reps, seed};
            return fit_cls(d, u, &plan);
        },
        py::arg("dataset"), py::arg("unbiased") = "tsls", py::arg("bootstrap_reps") = 100,
        py::arg("seed") = 0,
        "Convex least squares; the JIVE endpoint estimates its proportion by bootstrap");

    py::class_<BootstrapMoments>(m, "BootstrapMoments")
        .def_readonly("mean", &BootstrapMoments::mean)
        .def_readonly("cov", &BootstrapMoments::cov)
        .def_readonly("failures", &BootstrapMoments::failures)
        .def_readonly("replicates", &BootstrapMoments::replicates)
        .def_readonly("pi_values", &BootstrapMoments::pi_values)
        .def_readonly("replicate_values", &BootstrapMoments::replicate_values)
        .def_property_readonly("mse_parts_star",
                               [](const BootstrapMoments& m) { return m.mse_parts_star; });

    m.def(
        "bootstrap_variance_cls",
        [](const Dataset& d, int B, std::uint64_t seed, const std::string& unbiased,
           int workers) {
            return bootstrap_variance_cls(d, BootstrapPlan{B, seed},
                                          unbiased_from_string(unbiased), workers);
        },
        py::arg("dataset"), py::arg("bootstrap_reps") = 100, py::arg("seed") = 0,
        py::arg("unbiased") = "tsls", py::arg("workers") = 1);

    m.def(
        "bootstrap_pi",
        [](const Dataset& d, const std::string& unbiased, int B, std::uint64_t seed,
           int workers) {
            auto [est, moments] =
                bootstrap_pi(d, unbiased_from_string(unbiased), BootstrapPlan{B, seed}, workers);
            return py::make_tuple(est.pi, est.degenerate, moments);
        },
        py::arg("dataset"), py::arg("unbiased") = "jive", py::arg("bootstrap_reps") = 100,
        py::arg("seed") = 0, py::arg("workers") = 1, "Returns (pi, degenerate, moments)");

    m.def(
        "bootstrap_mse_optimality_check",
        [](const BootstrapMoments& moments, double pi_star) {
            return bootstrap_mse_optimality_check(moments, pi_star);
        },
        py::arg("moments"), py::arg("pi_star"));

    m.def(
        "draw_model_i",
        [](double alpha, double gamma, Index n, double beta, std::uint64_t seed,
           std::uint64_t iteration) {
            const ScenarioSpec spec = make_spec("I", alpha, gamma, n, 1, beta, 2, seed);
            RngStream stream(substream(seed, iteration));
            return draw_model_i(spec, stream);
        },
        py::arg("alpha"), py::arg("gamma"), py::arg("n"), py::arg("beta") = 0.5,
        py::arg("seed") = 0, py::arg("iteration") = 0);

    m.def(
        "draw_model_ii",
        [](double alpha, double gamma, Index n, Index l, double beta, std::uint64_t seed,
           std::uint64_t iteration) {
            const ScenarioSpec spec = make_spec("II", alpha, gamma, n, l, beta, 2, seed);
            RngStream stream(substream(seed, iteration));
            return draw_model_ii(spec, stream);
        },
        py::arg("alpha"), py::arg("gamma"), py::arg("n"), py::arg("l"), py::arg("beta") = 0.5,
        py::arg("seed") = 0, py::arg("iteration") = 0);

    py::class_<McSummary>(m, "McSummary")
        .def_property_readonly("estimator",
                               [](const McSummary& s) { return to_string(s.method); })
        .def_readonly("bias", &McSummary::bias)
        .def_readonly("variance", &McSummary::variance)
        .def_readonly("mse", &McSummary::mse)
        .def_readonly("mean_abs_err", &McSummary::mean_abs_err)
        .def_readonly("iterations", &McSummary::iterations)
        .def_readonly("failures", &McSummary::failures)
        .def("sd", &McSummary::sd)
        .def("rmse", &McSummary::rmse)
        .def("bias_norm", &McSummary::bias_norm);

    m.def(
        "run_monte_carlo",
        [](const std::string& model, double alpha, double gamma, Index n, Index l, double beta,
           int iterations, std::uint64_t seed, const std::vector<std::string>& estimators,
           int bootstrap_reps, int workers) {
            const ScenarioSpec spec =
                make_spec(model, alpha, gamma, n, l, beta, iterations, seed);
            std::vector<MethodSpec> methods;
            for (const auto& name : estimators) {
                methods.push_back({method_from_string(name), bootstrap_reps});
            }
            py::gil_scoped_release release;
            return run_monte_carlo(spec, methods, workers);
        },
        py::arg("model") = "I", py::arg("alpha") = 0.25, py::arg("gamma") = 0.5,
        py::arg("n") = 100, py::arg("l") = 1, py::arg("beta") = 0.5,
        py::arg("iterations") = 1000, py::arg("seed") = 0,
        py::arg("estimators") = std::vector<std::string>{"ols", "tsls", "cls-tsls"},
        py::arg("bootstrap_reps") = 100, py::arg("workers") = 1);
}
